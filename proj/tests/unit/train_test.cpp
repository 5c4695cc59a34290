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

#include <cmath>
#include <limits>
#include <regex>

#include <gtest/gtest.h>

#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/train.hpp"
#include "test_util.hpp"

using namespace argue;
using argue::testing::expect_error;

namespace {

TaskSpec small_spec(std::uint64_t seed = 0) {
  TaskSpec s;
  s.classes = 6;
  s.shots = 8;
  s.test_per_class = 20;
  s.seed = seed;
  return s;
}

const GeneratedTask& small_task() {
  static const GeneratedTask g = generate_task(small_spec(3));
  return g;
}

TrainConfig quick(Mode mode) {
  TrainConfig c;
  c.mode = mode;
  c.epochs = 15;
  c.shots = 8;
  c.seed = 1;
  return c;
}

TrainResult run(const TrainConfig& cfg) {
  const GeneratedTask& g = small_task();
  return train(cfg, g.task, g.vocab, prepare_attributes(cfg, g.task, g.vocab, &g.pool));
}

}  // namespace

TEST(Sgd, Examples) {
  SoftPromptBank b;
  b.values = Matrix(1, 1, 1.0);
  sgd_step(b, Matrix(1, 1, 0.5), 0.032);
  EXPECT_DOUBLE_EQ(b.values[0], 0.984);
  const SoftPromptBank before = b;
  sgd_step(b, Matrix(1, 1, 0.0), 0.032);
  sgd_step(b, Matrix(1, 1, 3.0), 0.0);
  EXPECT_EQ(b, before);
  expect_error(ErrorKind::NonFiniteGradient,
               [&] { sgd_step(b, Matrix(1, 1, std::numeric_limits<double>::quiet_NaN()), 0.1); });
  expect_error(ErrorKind::DimensionMismatch, [&] { sgd_step(b, Matrix(1, 2), 0.1); });
}

TEST(HarmonicMean, Values) {
  EXPECT_NEAR(harmonic_mean(82.69, 63.22), 71.66, 0.01);
  EXPECT_NEAR(harmonic_mean(83.77, 78.74), 81.18, 0.01);
  EXPECT_DOUBLE_EQ(harmonic_mean(42.0, 42.0), 42.0);
  EXPECT_EQ(harmonic_mean(42.0, 0.0), 0.0);
  EXPECT_EQ(harmonic_mean(0.0, 0.0), 0.0);
  expect_error(ErrorKind::NegativeInput, [] { harmonic_mean(-1.0, 5.0); });
}

TEST(Modes, ParseAndEffectiveGamma) {
  EXPECT_EQ(parse_mode("argue_n"), Mode::ArgueN);
  EXPECT_EQ(to_string(parse_mode("baseline")), "baseline");
  EXPECT_EQ(parse_negative_kind("class_specific"), NegativeKind::ClassSpecific);
  expect_error(ErrorKind::InvalidConfig, [] { parse_mode("coop"); });
  TrainConfig c;
  c.mode = Mode::Argue;
  EXPECT_EQ(c.effective_gamma(), 0.0);
  c.mode = Mode::ArgueN;
  EXPECT_EQ(c.effective_gamma(), 3.0);
}

TEST(Train, DeterministicCheckpoints) {
  const TrainResult a = run(quick(Mode::ArgueN));
  const TrainResult b = run(quick(Mode::ArgueN));
  EXPECT_EQ(a.checkpoint, b.checkpoint);
  EXPECT_EQ(checkpoint_to_json(a.checkpoint), checkpoint_to_json(b.checkpoint));
  EXPECT_EQ(history_to_csv(a.history), history_to_csv(b.history));
  EXPECT_GT(a.checkpoint.steps, 0u);
}

TEST(Train, ArgueLossDecreases) {
  TrainConfig c = quick(Mode::Argue);
  c.epochs = 50;
  const TrainResult r = run(c);
  ASSERT_EQ(r.history.size(), 50u);
  EXPECT_LT(r.history.back().total, r.history.front().total);
  EXPECT_TRUE(r.history.front().l_reg.has_value());
  EXPECT_FALSE(r.history.front().l_neg.has_value());
}

TEST(Train, BaselineHasNoNegativeTerm) {
  TrainConfig c = quick(Mode::Baseline);
  c.gamma = 5.0;
  const TrainResult r = run(c);
  for (const auto& e : r.history) EXPECT_FALSE(e.l_neg.has_value());
  EXPECT_TRUE(r.checkpoint.attributes.empty());
}

TEST(Train, ArgueNRecordsNegativeTerm) {
  const TrainResult r = run(quick(Mode::ArgueN));
  for (const auto& e : r.history) {
    ASSERT_TRUE(e.l_neg.has_value());
    EXPECT_GE(*e.l_neg, std::log(3.0) - 1e-9);  // three base classes
  }
}

TEST(Train, DivergesLoudly) {
  TrainConfig c = quick(Mode::Argue);
  c.tau = 1e-310;  // logits overflow to inf
  expect_error(ErrorKind::DivergedLoss, [&] { run(c); });
}

TEST(Train, RejectsVocabularyMismatch) {
  const GeneratedTask& g = small_task();
  const GeneratedTask other = generate_task(small_spec(4));
  const TrainConfig c = quick(Mode::Baseline);
  expect_error(ErrorKind::VocabularyHashMismatch, [&] { train(c, g.task, other.vocab, {}); });
}

TEST(Train, AttributeModesNeedPool) {
  const GeneratedTask& g = small_task();
  expect_error(ErrorKind::MissingInput,
               [&] { prepare_attributes(quick(Mode::Argue), g.task, g.vocab, nullptr); });
  EXPECT_TRUE(prepare_attributes(quick(Mode::Baseline), g.task, g.vocab, nullptr).empty());
}

TEST(Checkpoint, RoundTripAndErrors) {
  const GeneratedTask& g = small_task();
  const Checkpoint ck = run(quick(Mode::ArgueN)).checkpoint;
  argue::testing::TempDir dir;
  save_checkpoint(ck, dir / "ck.json");
  EXPECT_EQ(load_checkpoint(dir / "ck.json", &g.vocab), ck);

  write_text(dir / "bad.json", "{not json");
  expect_error(ErrorKind::VersionMismatch, [&] { load_checkpoint(dir / "bad.json"); });
  const std::string text =
      std::regex_replace(checkpoint_to_json(ck), std::regex("\"version\": *1"), "\"version\": 7");
  expect_error(ErrorKind::VersionMismatch, [&] { checkpoint_from_json(text); });

  const GeneratedTask other = generate_task(small_spec(4));
  expect_error(ErrorKind::VocabularyHashMismatch, [&] { load_checkpoint(dir / "ck.json", &other.vocab); });
}

TEST(Evaluate, SplitsAndReport) {
  const GeneratedTask& g = small_task();
  const Checkpoint ck = run(quick(Mode::ArgueN)).checkpoint;
  const EvalReport rep = evaluate_splits(ck, g.task, g.vocab);
  ASSERT_EQ(rep.splits.size(), split_names().size());
  for (const auto& s : rep.splits) {
    EXPECT_GE(s.accuracy, 0.0);
    EXPECT_LE(s.accuracy, 100.0);
    EXPECT_NEAR(s.accuracy, 100.0 * s.correct / s.total, 1e-12);
  }
  EXPECT_NEAR(rep.harmonic, harmonic_mean(rep.base, rep.novel), 1e-12);
  const SplitResult again = evaluate(ck, g.task, g.vocab, "base_test");
  EXPECT_EQ(again.correct, rep.splits[0].correct);
  EXPECT_GT(rep.base, 60.0);  // well above the 33% chance level
  expect_error(ErrorKind::UnknownSplit, [&] { evaluate(ck, g.task, g.vocab, "val"); });
  EXPECT_EQ(report_to_csv(rep).rfind("split,accuracy,correct,total\n", 0), 0u);
  EXPECT_NE(report_to_markdown(rep, "x").find("| Method | Base | New | H |"), std::string::npos);
}

TEST(Evaluate, RandomPromptsNearChance) {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TaskSpec s = small_spec(seed);
    s.classes = 20;
    s.base_fraction = 0.5;
    const GeneratedTask g = generate_task(s);
    Checkpoint ck;
    ck.config.mode = Mode::Baseline;
    ck.config.init_phrase = "";
    ck.bank = init_soft_prompts(g.vocab, 4, "", seed);
    ck.vocab_hash = g.vocab.hash();
    ck.text_encoder_seed = g.task.text_encoder.seed;
    ck.image_encoder_seed = g.task.image_encoder.seed;
    // Scramble the class-name association by evaluating on zeroed signatures.
    sum += evaluate(ck, g.task, g.vocab, "ood_zeroed_signature").accuracy;
  }
  EXPECT_LT(sum / 4, 60.0);
}

TEST(Sweep, RowsAndParameters) {
  const GeneratedTask& g = small_task();
  TrainConfig c = quick(Mode::ArgueN);
  c.epochs = 3;
  const auto rows = sweep(c, "gamma", {"0", "1", "3", "5"}, g.task, g.vocab, &g.pool, 2);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].value, "3");
  EXPECT_EQ(sweep(c, "gamma", {"0", "1", "3", "5"}, g.task, g.vocab, &g.pool, 1)[3].ood_mean,
            rows[3].ood_mean);
  EXPECT_EQ(with_parameter(c, "clusters", "4").clusters, 4u);
  EXPECT_EQ(with_parameter(c, "beta", "2.5").beta, 2.5);
  expect_error(ErrorKind::UnknownParameter, [&] { with_parameter(c, "lr", "1"); });
  const std::string csv = sweep_to_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Sweep, AllClustersEqualsFullPool) {
  const GeneratedTask& g = small_task();
  TrainConfig c = quick(Mode::Argue);
  c.epochs = 3;
  c.clusters = g.task.spec.attributes;
  const auto attrs = prepare_attributes(c, g.task, g.vocab, &g.pool);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    EXPECT_EQ(attrs[i].attributes, g.pool.find(attrs[i].class_name).attributes);
  }
}
