// ----------------------------------------------------------------------------
// Copyright 2026 The ArgueLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argue/attribute.hpp"
#include "argue/prompt.hpp"
#include "argue/synthbench.hpp"

namespace argue {

enum class Mode { Baseline, Argue, ArgueN };
enum class NegativeKind { General, ClassSpecific };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);
NegativeKind parse_negative_kind(std::string_view name);
std::string_view to_string(NegativeKind kind);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.032;
  double momentum = 0.5;
  double tau = 0.03;
  double beta = 20.0;
  double gamma = 3.0;
  std::size_t M = 4;
  std::size_t clusters = 3;
  std::size_t shots = 16;
  std::uint64_t seed = 0;
  Mode mode = Mode::ArgueN;
  NegativeKind negative = NegativeKind::General;
  std::string init_phrase = "a photo of a";
  std::string template_text = "a photo of a";

  // baseline and argue train without the negative term whatever gamma says.
  double effective_gamma() const { return mode == Mode::ArgueN ? gamma : 0.0; }
  bool uses_attributes() const { return mode != Mode::Baseline; }
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Attributes that enter a class's prompts, in pool order.
struct ClassAttributes {
  std::string class_name;
  std::vector<PoolAttribute> attributes;
  bool operator==(const ClassAttributes&) const = default;
};

std::vector<ClassAttributes> resolve_attributes(const SampledAttributes& sampled,
                                                const AttributePool& pool);

// Runs attribute sampling for every task class on its own training shots
// (new classes' shots are never used for tuning). Empty for baseline mode.
std::vector<ClassAttributes> prepare_attributes(const TrainConfig& config, const Task& task,
                                                const Vocabulary& vocab,
                                                const AttributePool* pool,
                                                SampledAttributes* sampled = nullptr);

struct Checkpoint {
  static constexpr int kFormatVersion = 1;
  TrainConfig config;
  SoftPromptBank bank;
  std::string vocab_hash;
  std::uint64_t text_encoder_seed = 0;
  std::uint64_t image_encoder_seed = 0;
  std::size_t steps = 0;
  std::vector<ClassAttributes> attributes;

  bool operator==(const Checkpoint&) const = default;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
// Unparsable or wrong-version documents raise VersionMismatch. With `vocab`,
// also verifies the vocabulary hash.
Checkpoint checkpoint_from_json(std::string_view text, const Vocabulary* vocab = nullptr);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* vocab = nullptr);

struct EpochLoss {
  std::size_t epoch = 0;
  double l_ent = 0.0;
  std::optional<double> l_reg;
  std::optional<double> l_neg;
  double total = 0.0;
  bool operator==(const EpochLoss&) const = default;
};

std::string history_to_csv(const std::vector<EpochLoss>& history);

// p <- p - lr * g
void sgd_step(SoftPromptBank& bank, const Matrix& gradient, double learning_rate);

/// Everything a training step differentiates, built once per run: prompt
/// sets, cached textual targets and encoded base-class shots.
class Objective {
 public:
  Objective(const TrainConfig& config, const Task& task, const Vocabulary& vocab,
            const std::vector<ClassAttributes>& attributes);

  struct Terms {
    ad::Var l_ent, l_reg, l_neg, total;
    bool has_reg = false, has_neg = false;
  };
  // Loss on the given rows of the training image matrix.
  Terms build(ad::Tape& tape, ad::Var bank, const std::vector<std::size_t>& rows) const;

  std::size_t sample_count() const noexcept { return labels_.size(); }
  const SoftPromptBank& initial_bank() const noexcept { return bank0_; }

 private:
  TrainConfig config_;
  DualEncoder enc_;
  Lexicon lexicon_;
  SoftPromptBank bank0_;
  std::optional<PromptSet> prompts_;
  std::optional<PromptSet> negatives_;
  std::vector<std::size_t> segments_;
  Matrix textual_;
  Matrix images_;
  std::vector<std::size_t> labels_;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLoss> history;
};

TrainResult train(const TrainConfig& config, const Task& task, const Vocabulary& vocab,
                  const std::vector<ClassAttributes>& attributes);

inline const std::vector<std::string>& split_names() {
  static const std::vector<std::string> names{
      "base_test", "new_test", "id_test", "ood_shuffled_signature", "ood_zeroed_signature",
      "ood_noise_boost"};
  return names;
}

struct SplitResult {
  std::string split;
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Accuracy (percent) of argmax predictions over the split's class set: new
// classes for new_test, base classes otherwise.
SplitResult evaluate(const Checkpoint& ckpt, const Task& task, const Vocabulary& vocab,
                     std::string_view split);

struct EvalReport {
  double base = 0.0;
  double novel = 0.0;
  double harmonic = 0.0;
  std::vector<SplitResult> splits;
  double ood_mean() const;
};

EvalReport evaluate_splits(const Checkpoint& ckpt, const Task& task, const Vocabulary& vocab,
                           const std::vector<std::string>& splits = split_names());
std::string report_to_csv(const EvalReport& report);
std::string report_to_markdown(const EvalReport& report, std::string_view title);

double harmonic_mean(double base, double novel);

struct SweepRow {
  std::string value;
  double base = 0.0, novel = 0.0, harmonic = 0.0, ood_mean = 0.0;
};

// Applies `param` (gamma | beta | clusters | shots) to `config`.
TrainConfig with_parameter(TrainConfig config, std::string_view param, std::string_view value);

// One full sample+train+evaluate per value, results in value order.
// `on_row` fires as each run completes (from worker threads, serialized).
std::vector<SweepRow> sweep(const TrainConfig& config, std::string_view param,
                            const std::vector<std::string>& values, const Task& task,
                            const Vocabulary& vocab, const AttributePool* pool,
                            std::size_t threads = 1,
                            const std::function<void(const SweepRow&)>& on_row = {});
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string format_sweep_row(const SweepRow& row);

}  // namespace argue
