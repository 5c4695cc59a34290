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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "argue/attribute.hpp"
#include "argue/encoder.hpp"

namespace argue {

/// Synthetic few-shot task parameters. Features are F = K core + S spurious
/// ("background signature") + remaining pure-noise coordinates.
struct TaskSpec {
  std::size_t classes = 10;
  double base_fraction = 0.5;
  std::size_t shots = 16;
  double rho = 0.95;  // P(train image carries its own class signature)
  std::size_t core_dim = 12;
  std::size_t spurious_dim = 8;
  std::size_t feature_dim = 24;
  double noise_std = 0.3;
  std::size_t attributes = 15;  // J, including distractors
  std::size_t sharing = 2;      // classes per core attribute direction
  std::size_t aspects = 3;      // core sub-blocks attributes are drawn from
  std::size_t nonvisual = 2;
  std::size_t wrong_signature = 2;
  std::size_t test_per_class = 200;
  std::size_t d_tok = 32;
  std::size_t embed_dim = 32;
  std::size_t max_length = 16;
  // Class-name token = name_core * core(c) + name_signature * signature(c),
  // i.e. names carry a background association as web-trained names do.
  double name_core = 0.1;
  double name_signature = 1.0;
  double distractor_mix = 0.3;  // weight of the visual part in a distractor token
  double perturbation = 0.05;
  double template_norm = 0.3;
  double token_norm = 1.0;
  double noise_boost = 2.0;  // extra noise std, in units of noise_std
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TaskSpec&) const = default;
};

struct LabeledSet {
  Matrix features;                  // n x F
  std::vector<std::size_t> labels;  // task-wide class ids
  bool operator==(const LabeledSet&) const = default;
};

// Generator metadata for oracle tests only; no training or sampling code
// reads it.
struct GroundTruth {
  Matrix core;        // C x F
  Matrix signatures;  // C x F
  std::vector<std::size_t> id_test_signature;
  std::map<std::string, std::string> attribute_kind;  // text -> true|nonvisual|wrong_signature
  bool operator==(const GroundTruth&) const = default;
};

enum class OodKind { ShuffledSignature, ZeroedSignature, NoiseBoost };
OodKind parse_ood_kind(std::string_view name);
std::string_view to_string(OodKind kind);

struct Task {
  static constexpr int kFormatVersion = 1;
  TaskSpec spec;
  TextEncoderConfig text_encoder;
  ImageEncoderConfig image_encoder;
  std::string vocab_hash;
  std::string template_text = "a photo of a";
  std::vector<std::string> class_names;
  std::vector<std::size_t> base_classes;
  std::vector<std::size_t> new_classes;
  std::string general_negative;
  std::vector<std::string> class_negatives;
  LabeledSet train, base_test, new_test, id_test;
  GroundTruth truth;

  DualEncoder encoders() const;
  // Training shots of class c, first `shots` rows (all when shots == 0).
  Matrix class_train_images(std::size_t c, std::size_t shots = 0) const;

  std::string to_json() const;
  static Task from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Task load(const std::filesystem::path& path);
  bool operator==(const Task&) const;
};

struct GeneratedTask {
  Task task;
  Vocabulary vocab;
  AttributePool pool;
};

GeneratedTask generate_task(const TaskSpec& spec);

// Transforms only the named nuisance of the id_test split; labels and core
// directions are untouched and the size equals the id_test size.
LabeledSet make_ood_variant(const Task& task, OodKind kind, std::uint64_t seed);

}  // namespace argue
