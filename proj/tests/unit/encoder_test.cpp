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
#include <random>

#include <gtest/gtest.h>

#include "argue/encoder.hpp"
#include "argue/error.hpp"
#include "argue/random.hpp"
#include "test_util.hpp"

using namespace argue;
using argue::testing::expect_error;
using argue::testing::random_matrix;

namespace {

Vocabulary small_vocab() {
  VocabularySpec spec;
  spec.class_names = {"cat", "dog", "sea lion"};
  spec.attributes = {"striped fur", "long tail", "wet skin"};
  spec.negatives = {"blurry"};
  spec.template_words = {"a", "photo", "of"};
  return build_vocabulary(spec, 5, 8);
}

TextEncoderConfig text_config() {
  TextEncoderConfig c;
  c.seed = 11;
  c.d_tok = 8;
  c.dim = 12;
  c.max_length = 8;
  return c;
}

}  // namespace

TEST(Vocabulary, BuildsOneTokenPerDistinctWord) {
  const Vocabulary v = small_vocab();
  EXPECT_EQ(v.text(Vocabulary::kPad), v.text(0));
  for (const char* w : {"cat", "dog", "sea", "lion", "striped", "fur", "blurry", "photo"}) {
    EXPECT_TRUE(v.contains(w)) << w;
    EXPECT_NEAR(norm(v.embedding(v.id(w)).span()), 1.0, 1e-12);
  }
  EXPECT_FALSE(v.contains("zebra"));
  expect_error(ErrorKind::UnknownToken, [&] { v.id("zebra"); });
}

TEST(Vocabulary, DeterministicAndSeedSensitive) {
  EXPECT_EQ(small_vocab(), small_vocab());
  EXPECT_EQ(small_vocab().hash(), small_vocab().hash());
  VocabularySpec spec;
  spec.class_names = {"cat", "dog"};
  EXPECT_NE(build_vocabulary(spec, 1, 8).hash(), build_vocabulary(spec, 2, 8).hash());
}

TEST(Vocabulary, JsonRoundTrip) {
  const Vocabulary v = small_vocab();
  const Vocabulary back = Vocabulary::from_json(v.to_json());
  EXPECT_EQ(back, v);
  EXPECT_EQ(back.hash(), v.hash());
}

TEST(Vocabulary, RejectsDuplicatesAndBadSpecs) {
  Vocabulary v(1, 2);
  v.add("x", Vector{1.0, 0.0});
  expect_error(ErrorKind::DuplicateToken, [&] { v.add("x", Vector{0.0, 1.0}); });
  VocabularySpec spec;
  expect_error(ErrorKind::EmptySpec, [&] { build_vocabulary(spec, 0, 4); });
  spec.class_names = {"cat", "cat"};
  expect_error(ErrorKind::DuplicateToken, [&] { build_vocabulary(spec, 0, 4); });
}

TEST(Vocabulary, RejectsWrongVersion) {
  std::string json = small_vocab().to_json();
  const auto at = json.find("\"version\":1");
  ASSERT_NE(at, std::string::npos);
  json.replace(at, 11, "\"version\":9");
  expect_error(ErrorKind::VersionMismatch, [&] { Vocabulary::from_json(json); });
}

TEST(Tokenize, SplitsOnWhitespaceAndChecksLength) {
  const Vocabulary v = small_vocab();
  EXPECT_EQ(split_words("  a photo\tof  a cat "),
            (std::vector<std::string>{"a", "photo", "of", "a", "cat"}));
  const auto ids = tokenize("a photo of a cat", v, 8);
  ASSERT_EQ(ids.size(), 5u);
  EXPECT_EQ(ids[0], ids[3]);
  EXPECT_EQ(ids[4], v.id("cat"));
  expect_error(ErrorKind::UnknownToken, [&] { tokenize("a zebra", v, 8); });
  expect_error(ErrorKind::SequenceTooLong, [&] { tokenize("a photo of a cat", v, 4); });
}

TEST(TextEncoder, UnitNormDeterministicAndOrderSensitive) {
  const Vocabulary v = small_vocab();
  const TextEncoder a(text_config()), b(text_config());
  const std::vector<Vector> fwd = {v.embedding(v.id("long")), v.embedding(v.id("tail"))};
  const std::vector<Vector> rev = {fwd[1], fwd[0]};
  const Vector ea = a.encode(fwd);
  EXPECT_NEAR(norm(ea.span()), 1.0, 1e-12);
  EXPECT_EQ(ea, b.encode(fwd));
  EXPECT_LT(cosine_similarity(ea, a.encode(rev)), 1.0 - 1e-6);

  auto other = text_config();
  other.seed = 12;
  EXPECT_NE(ea, TextEncoder(other).encode(fwd));
}

TEST(TextEncoder, TapeAndPlainPathsAgree) {
  std::mt19937_64 rng(3);
  const TextEncoder enc(text_config());
  const Matrix tokens = random_matrix(5, 8, rng);
  ad::Tape t;
  const Matrix out = enc.encode(t.constant(tokens)).value();
  const Vector plain = enc.encode(tokens);
  ASSERT_EQ(out.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_NEAR(out[i], plain[i], 1e-14);
}

TEST(TextEncoder, GradientWithRespectToTokens) {
  std::mt19937_64 rng(4);
  const TextEncoder enc(text_config());
  const Matrix tokens = random_matrix(4, 8, rng);
  const Matrix w = random_matrix(1, 12, rng);
  auto loss = [&](ad::Tape& t, ad::Var p) {
    return ad::sum(ad::mul(t.constant(w), enc.encode(p)));
  };
  EXPECT_LT(ad::gradient_check(loss, tokens, 1e-5).max_rel_err, 1e-5);
}

TEST(TextEncoder, RejectsBadSequences) {
  const TextEncoder enc(text_config());
  expect_error(ErrorKind::EmptySequence, [&] { enc.encode(Matrix(0, 8)); });
  expect_error(ErrorKind::SequenceTooLong, [&] { enc.encode(Matrix(9, 8)); });
  expect_error(ErrorKind::DimensionMismatch, [&] { enc.encode(Matrix(2, 7)); });
}

TEST(TextEncoder, InverseDirectionPlantsTarget) {
  // A token built from inverse_direction moves the output toward the target
  // far more than a random token of the same norm does.
  std::mt19937_64 rng(9);
  const TextEncoder enc(text_config());
  const Vector base_tok = l2_normalize(argue::testing::random_vector(8, rng));
  int wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector target = l2_normalize(argue::testing::random_vector(12, rng));
    Vector planted = l2_normalize(enc.inverse_direction(target));
    Vector random = l2_normalize(argue::testing::random_vector(8, rng));
    const double before = cosine_similarity(enc.encode(std::vector<Vector>{base_tok}), target);
    const double gain_p = cosine_similarity(enc.encode(std::vector<Vector>{base_tok, planted}),
                                            target) - before;
    const double gain_r = cosine_similarity(enc.encode(std::vector<Vector>{base_tok, random}),
                                            target) - before;
    wins += gain_p > gain_r;
  }
  EXPECT_GE(wins, 18);
}

TEST(ImageEncoder, UnitOutputsAndBlockSeparation) {
  ImageEncoderConfig c;
  c.features = 6;
  c.dim = 8;
  c.blocks = {2, 4};
  c.bias_std = 0.0;
  const ImageEncoder enc(c);
  Vector x(6);
  x[0] = 1.0;
  const Vector y = enc.encode(x);
  EXPECT_NEAR(norm(y.span()), 1.0, 1e-12);
  // First block lands on the first two output coordinates only.
  for (std::size_t i = 2; i < 8; ++i) EXPECT_NEAR(y[i], 0.0, 1e-12);

  std::mt19937_64 rng(1);
  const Matrix rows = random_matrix(3, 6, rng);
  const Matrix enc_rows = enc.encode_rows(rows);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(enc_rows.row_vector(r), enc.encode(rows.row_vector(r)));

  c.blocks = {2, 3};
  expect_error(ErrorKind::InvalidConfig, [&] { ImageEncoder bad(c); });
}
