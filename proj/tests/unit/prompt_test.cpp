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

#include <random>

#include <gtest/gtest.h>

#include "argue/error.hpp"
#include "argue/prompt.hpp"
#include "test_util.hpp"

using namespace argue;
using argue::testing::expect_error;

namespace {

struct Fixture {
  Vocabulary vocab;
  TextEncoder enc;
  Lexicon lex;
  SoftPromptBank bank;

  Fixture()
      : vocab(make_vocab()), enc(make_encoder()), lex(vocab),
        bank(init_soft_prompts(vocab, 4, "a photo of a", 0)) {
    lex.add_class("cat");
    lex.add_class("sea lion");
    lex.add_attribute("striped fur");
    lex.add_attribute("wet skin");
    lex.add_negative("blurry");
  }

  static Vocabulary make_vocab() {
    VocabularySpec spec;
    spec.class_names = {"cat", "sea lion"};
    spec.attributes = {"striped fur", "wet skin"};
    spec.negatives = {"blurry"};
    spec.template_words = {"a", "photo", "of"};
    return build_vocabulary(spec, 2, 8);
  }
  static TextEncoder make_encoder() {
    TextEncoderConfig c;
    c.d_tok = 8;
    c.dim = 10;
    c.max_length = 10;
    return TextEncoder(c);
  }
};

std::vector<TokenRef> soft_prefix(std::size_t M) {
  std::vector<TokenRef> out;
  for (std::size_t i = 0; i < M; ++i) out.push_back({true, i});
  return out;
}

}  // namespace

TEST(SoftPromptBank, PhraseInitCopiesEmbeddings) {
  Fixture f;
  ASSERT_EQ(f.bank.size(), 4u);
  EXPECT_EQ(f.bank.values.row_vector(1), f.vocab.embedding(f.vocab.id("photo")));
  EXPECT_EQ(f.bank.values.row_vector(0), f.bank.values.row_vector(3));
  expect_error(ErrorKind::PhraseLengthMismatch,
               [&] { init_soft_prompts(f.vocab, 3, "a photo of a", 0); });
}

TEST(SoftPromptBank, RandomInitIsSmallAndSeeded) {
  Fixture f;
  const SoftPromptBank a = init_soft_prompts(f.vocab, 4, "", 7);
  EXPECT_EQ(a, init_soft_prompts(f.vocab, 4, "", 7));
  EXPECT_NE(a.values, init_soft_prompts(f.vocab, 4, "", 8).values);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_LT(std::abs(a.values[i]), 0.2);
}

TEST(Lexicon, DeduplicatesAttributes) {
  Fixture f;
  EXPECT_EQ(f.lex.add_attribute("striped fur"), f.lex.attribute_id("striped fur"));
  EXPECT_EQ(f.lex.attribute_count(), 2u);
  EXPECT_EQ(f.lex.class_tokens(f.lex.class_id("sea lion")).size(), 2u);
  expect_error(ErrorKind::UnknownClass, [&] { f.lex.class_id("dog"); });
  expect_error(ErrorKind::UnknownAttribute, [&] { f.lex.attribute_id("fluffy"); });
  expect_error(ErrorKind::UnknownNegative, [&] { f.lex.negative_id("sharp"); });
}

TEST(Assembly, AttributePromptOrder) {
  Fixture f;
  const std::size_t c = f.lex.class_id("sea lion"), a = f.lex.attribute_id("wet skin");
  const PromptAssembly p = assemble_attribute_prompt(f.bank, f.lex, c, a, 10);
  auto expected = soft_prefix(4);
  for (const char* w : {"sea", "lion", "wet", "skin"}) expected.push_back({false, f.vocab.id(w)});
  EXPECT_EQ(p.tokens, expected);
  EXPECT_EQ(p.kind, PromptKind::AttributeGuided);
  EXPECT_EQ(p.soft_count(), 4u);

  const PromptAssembly plain = assemble_attribute_prompt(f.bank, f.lex, c, std::nullopt, 10);
  EXPECT_EQ(plain.length(), 6u);
  expect_error(ErrorKind::SequenceTooLong,
               [&] { assemble_attribute_prompt(f.bank, f.lex, c, a, 7); });
}

TEST(Assembly, NegativeAttributePrecedesClass) {
  Fixture f;
  const PromptAssembly p =
      assemble_negative_prompt(f.bank, f.lex, f.lex.class_id("cat"), f.lex.negative_id("blurry"), 10);
  auto expected = soft_prefix(4);
  expected.push_back({false, f.vocab.id("blurry")});
  expected.push_back({false, f.vocab.id("cat")});
  EXPECT_EQ(p.tokens, expected);
  EXPECT_EQ(p.kind, PromptKind::Negative);
}

TEST(Assembly, TextualPromptIsFrozen) {
  Fixture f;
  const PromptAssembly p = assemble_textual_prompt("a photo of a", f.lex, f.lex.class_id("cat"),
                                                   f.lex.attribute_id("striped fur"), 10);
  EXPECT_EQ(p.soft_count(), 0u);
  EXPECT_EQ(p.length(), 7u);
  EXPECT_EQ(p.tokens.back(), (TokenRef{false, f.vocab.id("fur")}));
}

TEST(Assembly, MaterializeUsesBankRows) {
  Fixture f;
  const PromptAssembly p = assemble_attribute_prompt(f.bank, f.lex, 0, 0, 10);
  const Matrix m = materialize(p, f.bank, f.vocab);
  EXPECT_EQ(m.rows(), p.length());
  EXPECT_EQ(m.row_vector(2), f.bank.values.row_vector(2));
  EXPECT_EQ(m.row_vector(4), f.vocab.embedding(f.vocab.id("cat")));
}

TEST(PromptSet, MatchesReferenceEncoding) {
  Fixture f;
  std::mt19937_64 rng(5);
  SoftPromptBank bank = f.bank;
  bank.values = argue::testing::random_matrix(4, 8, rng);
  std::vector<PromptAssembly> prompts;
  for (std::size_t c = 0; c < 2; ++c) {
    prompts.push_back(assemble_attribute_prompt(bank, f.lex, c, std::nullopt, 10));
    for (std::size_t a = 0; a < 2; ++a) prompts.push_back(assemble_attribute_prompt(bank, f.lex, c, a, 10));
    prompts.push_back(assemble_negative_prompt(bank, f.lex, c, 0, 10));
  }
  const PromptSet set(f.enc, f.vocab, prompts, 4);
  const Matrix fast = set.encode(bank);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const Vector ref = encode_prompt(f.enc, f.vocab, bank, prompts[i]);
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(fast(i, k), ref[k], 1e-12);
  }

  const Matrix w = argue::testing::random_matrix(fast.rows(), fast.cols(), rng);
  auto loss = [&](ad::Tape& t, ad::Var p) {
    return ad::sum(ad::mul(t.constant(w), set.encode(p)));
  };
  EXPECT_LT(ad::gradient_check(loss, bank.values, 1e-5).max_rel_err, 1e-5);
}

TEST(PromptSet, RejectsTextualPrompts) {
  Fixture f;
  std::vector<PromptAssembly> prompts = {assemble_textual_prompt("a photo of a", f.lex, 0, std::nullopt, 10)};
  expect_error(ErrorKind::InvalidSpec, [&] { PromptSet(f.enc, f.vocab, prompts, 4); });
}
