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

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "argue/error.hpp"
#include "argue/synthbench.hpp"
#include "test_util.hpp"

using namespace argue;
using argue::testing::expect_error;

namespace {

TaskSpec spec(std::uint64_t seed = 0) {
  TaskSpec s;
  s.test_per_class = 10;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Synthbench, Deterministic) {
  const GeneratedTask a = generate_task(spec(2)), b = generate_task(spec(2));
  EXPECT_EQ(a.task, b.task);
  EXPECT_EQ(a.vocab, b.vocab);
  EXPECT_EQ(a.pool, b.pool);
  EXPECT_EQ(a.task.to_json(), b.task.to_json());
  EXPECT_FALSE(generate_task(spec(3)).task == a.task);
}

TEST(Synthbench, ShapesAndSplit) {
  const GeneratedTask g = generate_task(spec());
  const Task& t = g.task;
  EXPECT_EQ(t.class_names.size(), 10u);
  EXPECT_EQ(t.base_classes.size(), 5u);
  EXPECT_EQ(t.new_classes.size(), 5u);
  EXPECT_EQ(t.vocab_hash, g.vocab.hash());
  EXPECT_EQ(t.train.features.rows(), 10u * 16u);
  EXPECT_EQ(t.train.features.cols(), t.spec.feature_dim);
  EXPECT_EQ(t.class_train_images(0, 4).rows(), 4u);
  for (const auto& pc : g.pool.classes) EXPECT_EQ(pc.attributes.size(), 15u);
  std::size_t nonvisual = 0, wrong = 0;
  for (const auto& [text, kind] : t.truth.attribute_kind) {
    nonvisual += kind == "nonvisual";
    wrong += kind == "wrong_signature";
  }
  EXPECT_EQ(nonvisual, 20u);
  EXPECT_EQ(wrong, 20u);
}

TEST(Synthbench, JsonRoundTrip) {
  const GeneratedTask g = generate_task(spec(5));
  EXPECT_EQ(Task::from_json(g.task.to_json()), g.task);
  std::string text = g.task.to_json();
  text.replace(text.find("\"version\":1"), 11, "\"version\":3");
  expect_error(ErrorKind::VersionMismatch, [&] { Task::from_json(text); });
}

TEST(Synthbench, OodVariantsTouchOnlyTheirNuisance) {
  const GeneratedTask g = generate_task(spec(1));
  const Task& t = g.task;
  const std::size_t K = t.spec.core_dim;
  for (OodKind kind : {OodKind::ShuffledSignature, OodKind::ZeroedSignature, OodKind::NoiseBoost}) {
    const LabeledSet v = make_ood_variant(t, kind, 9);
    EXPECT_EQ(v.labels, t.id_test.labels);
    ASSERT_EQ(v.features.rows(), t.id_test.features.rows());
    EXPECT_EQ(v, make_ood_variant(t, kind, 9));
    for (std::size_t r = 0; r < v.features.rows(); ++r) {
      for (std::size_t k = 0; k < K; ++k) {
        if (kind != OodKind::NoiseBoost) EXPECT_EQ(v.features(r, k), t.id_test.features(r, k));
      }
      if (kind == OodKind::ZeroedSignature) {
        const std::size_t sig = t.truth.id_test_signature[r];
        for (std::size_t i = 0; i < t.spec.feature_dim; ++i)
          EXPECT_NEAR(v.features(r, i), t.id_test.features(r, i) - t.truth.signatures(sig, i), 1e-14);
      }
    }
    EXPECT_FALSE(v.features == t.id_test.features);
  }
  EXPECT_EQ(parse_ood_kind("noise_boost"), OodKind::NoiseBoost);
  EXPECT_EQ(to_string(OodKind::ShuffledSignature), "shuffled_signature");
  expect_error(ErrorKind::UnknownKind, [] { parse_ood_kind("rain"); });
}

TEST(Synthbench, InvalidSpecs) {
  TaskSpec s = spec();
  s.classes = 1;
  expect_error(ErrorKind::InvalidSpec, [&] { generate_task(s); });
  s = spec();
  s.nonvisual = 10;
  s.wrong_signature = 10;
  expect_error(ErrorKind::InvalidSpec, [&] { generate_task(s); });
  s = spec();
  s.core_dim = 30;
  expect_error(ErrorKind::InvalidSpec, [&] { generate_task(s); });
}

TEST(Synthbench, ClassNamesCarrySignature) {
  // Without any training, "a photo of a {class}" matches the class's images
  // better than other classes' names on average (zero-shot above chance).
  const GeneratedTask g = generate_task(spec(6));
  const DualEncoder enc = g.task.encoders();
  std::size_t correct = 0, total = 0;
  std::vector<Vector> names;
  for (const auto& n : g.task.class_names) {
    std::vector<Vector> toks;
    for (const auto& w : split_words("a photo of a " + n)) toks.push_back(g.vocab.embedding(g.vocab.id(w)));
    names.push_back(enc.text.encode(toks));
  }
  for (std::size_t r = 0; r < g.task.train.features.rows(); ++r) {
    const Vector f = enc.image.encode(g.task.train.features.row_vector(r));
    std::size_t best = 0;
    for (std::size_t c = 1; c < names.size(); ++c)
      if (cosine_similarity(f, names[c]) > cosine_similarity(f, names[best])) best = c;
    correct += best == g.task.train.labels[r];
    ++total;
  }
  EXPECT_GT(static_cast<double>(correct) / total, 0.3);
}

namespace {

Vector encode_words(const GeneratedTask& g, const DualEncoder& enc, const std::string& text) {
  std::vector<Vector> toks;
  for (const auto& w : split_words(text)) toks.push_back(g.vocab.embedding(g.vocab.id(w)));
  return enc.text.encode(toks);
}

// Spearman rank correlation without tie handling (continuous inputs).
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST(Synthbench, NoiselessZeroShotIsAccurate) {
  TaskSpec s = spec(8);
  s.rho = 1.0;
  s.noise_std = 0.0;
  const GeneratedTask g = generate_task(s);
  const DualEncoder enc = g.task.encoders();
  std::vector<Vector> prompts;
  for (const auto& n : g.task.class_names) prompts.push_back(encode_words(g, enc, "a photo of a " + n));
  std::size_t correct = 0;
  const LabeledSet& id = g.task.id_test;
  for (std::size_t r = 0; r < id.features.rows(); ++r) {
    const Vector f = enc.image.encode(id.features.row_vector(r));
    std::size_t best = 0;
    for (std::size_t c = 1; c < prompts.size(); ++c)
      if (cosine_similarity(f, prompts[c]) > cosine_similarity(f, prompts[best])) best = c;
    correct += best == id.labels[r];
  }
  EXPECT_GT(100.0 * correct / id.labels.size(), 90.0);
}

TEST(Synthbench, NegativePromptTracksSignatureEnergy) {
  const GeneratedTask g = generate_task(spec(9));
  const DualEncoder enc = g.task.encoders();
  const std::size_t K = g.task.spec.core_dim, S = g.task.spec.spurious_dim;
  const Vector neg = encode_words(g, enc, "a photo of a " + g.task.general_negative);
  const LabeledSet& id = g.task.id_test;
  std::vector<double> score, sig_energy, core_energy;
  for (std::size_t r = 0; r < std::min<std::size_t>(200, id.features.rows()); ++r) {
    const Vector x = id.features.row_vector(r);
    double es = 0.0, ec = 0.0;
    for (std::size_t i = 0; i < K; ++i) ec += x[i] * x[i];
    for (std::size_t i = K; i < K + S; ++i) es += x[i] * x[i];
    score.push_back(cosine_similarity(enc.image.encode(x), neg));
    sig_energy.push_back(es);
    core_energy.push_back(ec);
  }
  EXPECT_GT(spearman(score, sig_energy), spearman(score, core_energy));
}
