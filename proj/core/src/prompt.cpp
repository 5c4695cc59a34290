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

#include "argue/prompt.hpp"

#include <algorithm>

#include "argue/error.hpp"
#include "argue/random.hpp"

namespace argue {

SoftPromptBank init_soft_prompts(const Vocabulary& vocab, std::size_t M, std::string_view phrase,
                                 std::uint64_t seed) {
  SoftPromptBank bank;
  bank.values = Matrix(M, vocab.d_tok());
  const auto words = split_words(phrase);
  if (words.empty()) {
    Rng rng(seed);
    bank.values = gaussian_matrix(M, vocab.d_tok(), rng, 0.02);
    bank.init = "gaussian:0.02:" + std::to_string(seed);
    return bank;
  }
  if (words.size() != M) {
    fail(ErrorKind::PhraseLengthMismatch, "'" + std::string(phrase) + "' has " +
                                              std::to_string(words.size()) + " tokens, M = " +
                                              std::to_string(M));
  }
  for (std::size_t m = 0; m < M; ++m) {
    const Vector& e = vocab.embedding(vocab.id(words[m]));
    std::copy(e.begin(), e.end(), bank.values.row_span(m).begin());
  }
  bank.init = "phrase:" + std::string(phrase);
  return bank;
}

// --- Lexicon ---------------------------------------------------------------

std::size_t Lexicon::add_class(const std::string& name) {
  if (auto it = class_index_.find(name); it != class_index_.end()) return it->second;
  Entry e{name, tokenize(name, *vocab_, vocab_->size())};
  if (e.tokens.empty()) fail(ErrorKind::EmptySpec, "blank class name");
  class_index_.emplace(name, classes_.size());
  classes_.push_back(std::move(e));
  return classes_.size() - 1;
}

std::size_t Lexicon::add_attribute(const std::string& text, bool planted) {
  if (auto it = attribute_index_.find(text); it != attribute_index_.end()) return it->second;
  Entry e{text, planted ? std::vector<std::size_t>{vocab_->id(text)}
                        : tokenize(text, *vocab_, vocab_->size())};
  if (e.tokens.empty()) fail(ErrorKind::EmptySpec, "blank attribute");
  attribute_index_.emplace(text, attributes_.size());
  attributes_.push_back(std::move(e));
  return attributes_.size() - 1;
}

std::size_t Lexicon::add_negative(const std::string& text) {
  if (auto it = negative_index_.find(text); it != negative_index_.end()) return it->second;
  Entry e{text, tokenize(text, *vocab_, vocab_->size())};
  if (e.tokens.empty()) fail(ErrorKind::EmptySpec, "blank negative attribute");
  negative_index_.emplace(text, negatives_.size());
  negatives_.push_back(std::move(e));
  return negatives_.size() - 1;
}

const std::vector<std::size_t>& Lexicon::class_tokens(std::size_t class_id) const {
  if (class_id >= classes_.size()) fail(ErrorKind::UnknownClass, std::to_string(class_id));
  return classes_[class_id].tokens;
}

const std::vector<std::size_t>& Lexicon::attribute_tokens(std::size_t attribute_id) const {
  if (attribute_id >= attributes_.size()) {
    fail(ErrorKind::UnknownAttribute, std::to_string(attribute_id));
  }
  return attributes_[attribute_id].tokens;
}

const std::vector<std::size_t>& Lexicon::negative_tokens(std::size_t negative_id) const {
  if (negative_id >= negatives_.size()) {
    fail(ErrorKind::UnknownNegative, std::to_string(negative_id));
  }
  return negatives_[negative_id].tokens;
}

std::size_t Lexicon::class_id(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  if (it == class_index_.end()) fail(ErrorKind::UnknownClass, std::string(name));
  return it->second;
}

std::size_t Lexicon::attribute_id(std::string_view text) const {
  auto it = attribute_index_.find(std::string(text));
  if (it == attribute_index_.end()) fail(ErrorKind::UnknownAttribute, std::string(text));
  return it->second;
}

std::size_t Lexicon::negative_id(std::string_view text) const {
  auto it = negative_index_.find(std::string(text));
  if (it == negative_index_.end()) fail(ErrorKind::UnknownNegative, std::string(text));
  return it->second;
}

const std::string& Lexicon::class_name(std::size_t class_id) const {
  if (class_id >= classes_.size()) fail(ErrorKind::UnknownClass, std::to_string(class_id));
  return classes_[class_id].text;
}

const std::string& Lexicon::attribute_text(std::size_t attribute_id) const {
  if (attribute_id >= attributes_.size()) {
    fail(ErrorKind::UnknownAttribute, std::to_string(attribute_id));
  }
  return attributes_[attribute_id].text;
}

// --- assembly --------------------------------------------------------------

std::size_t PromptAssembly::soft_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const TokenRef& t) { return t.soft; }));
}

namespace {

void append_soft(PromptAssembly& p, const SoftPromptBank& bank) {
  for (std::size_t m = 0; m < bank.size(); ++m) p.tokens.push_back({true, m});
}

void append_frozen(PromptAssembly& p, const std::vector<std::size_t>& ids) {
  for (std::size_t id : ids) p.tokens.push_back({false, id});
}

void check_length(const PromptAssembly& p, std::size_t max_length) {
  if (p.length() > max_length) {
    fail(ErrorKind::SequenceTooLong, "prompt of " + std::to_string(p.length()) + " tokens > " +
                                         std::to_string(max_length));
  }
}

}  // namespace

PromptAssembly assemble_attribute_prompt(const SoftPromptBank& bank, const Lexicon& lex,
                                         std::size_t class_id,
                                         std::optional<std::size_t> attribute_id,
                                         std::size_t max_length) {
  PromptAssembly p;
  p.kind = PromptKind::AttributeGuided;
  p.class_id = class_id;
  p.attribute_id = attribute_id;
  append_soft(p, bank);
  append_frozen(p, lex.class_tokens(class_id));
  if (attribute_id) append_frozen(p, lex.attribute_tokens(*attribute_id));
  check_length(p, max_length);
  return p;
}

PromptAssembly assemble_negative_prompt(const SoftPromptBank& bank, const Lexicon& lex,
                                        std::size_t class_id, std::size_t negative_id,
                                        std::size_t max_length) {
  PromptAssembly p;
  p.kind = PromptKind::Negative;
  p.class_id = class_id;
  p.negative_id = negative_id;
  const auto& cls = lex.class_tokens(class_id);
  append_soft(p, bank);
  append_frozen(p, lex.negative_tokens(negative_id));
  append_frozen(p, cls);
  check_length(p, max_length);
  return p;
}

PromptAssembly assemble_textual_prompt(std::string_view template_text, const Lexicon& lex,
                                       std::size_t class_id,
                                       std::optional<std::size_t> attribute_id,
                                       std::size_t max_length) {
  PromptAssembly p;
  p.kind = PromptKind::Textual;
  p.class_id = class_id;
  p.attribute_id = attribute_id;
  append_frozen(p, tokenize(template_text, lex.vocab(), max_length));
  append_frozen(p, lex.class_tokens(class_id));
  if (attribute_id) append_frozen(p, lex.attribute_tokens(*attribute_id));
  check_length(p, max_length);
  return p;
}

Matrix materialize(const PromptAssembly& prompt, const SoftPromptBank& bank,
                   const Vocabulary& vocab) {
  Matrix rows(prompt.length(), vocab.d_tok());
  for (std::size_t i = 0; i < prompt.length(); ++i) {
    const TokenRef& t = prompt.tokens[i];
    if (t.soft) {
      if (t.index >= bank.size()) fail(ErrorKind::IndexOutOfRange, "soft token index");
      auto src = bank.values.row_span(t.index);
      std::copy(src.begin(), src.end(), rows.row_span(i).begin());
    } else {
      const Vector& e = vocab.embedding(t.index);
      std::copy(e.begin(), e.end(), rows.row_span(i).begin());
    }
  }
  return rows;
}

ad::Var encode_prompt(const TextEncoder& enc, const Vocabulary& vocab, ad::Var bank,
                      const PromptAssembly& prompt) {
  ad::Tape& t = *bank.tape();
  std::vector<ad::Var> rows;
  for (const TokenRef& tok : prompt.tokens) {
    rows.push_back(tok.soft ? ad::slice_rows(bank, tok.index, 1)
                            : t.constant(Matrix::row(vocab.embedding(tok.index))));
  }
  if (rows.empty()) fail(ErrorKind::EmptySequence, "empty prompt");
  return enc.encode(ad::concat_rows(rows));
}

Vector encode_prompt(const TextEncoder& enc, const Vocabulary& vocab, const SoftPromptBank& bank,
                     const PromptAssembly& prompt) {
  return enc.encode(materialize(prompt, bank, vocab));
}

// --- PromptSet ---------------------------------------------------------------

PromptSet::PromptSet(const TextEncoder& enc, const Vocabulary& vocab,
                     std::vector<PromptAssembly> prompts, std::size_t bank_size)
    : enc_(&enc), bank_size_(bank_size), prompts_(std::move(prompts)) {
  for (const auto& p : prompts_) {
    for (std::size_t i = 0; i < p.length(); ++i) {
      const bool prefix = i < bank_size;
      if (p.tokens[i].soft != prefix || (prefix && p.tokens[i].index != i)) {
        fail(ErrorKind::InvalidSpec, "PromptSet needs prompts starting with p_1..p_M");
      }
    }
    if (p.length() > enc.max_length()) {
      fail(ErrorKind::SequenceTooLong, "prompt longer than encoder context");
    }
    const std::size_t frozen = p.length() - bank_size;
    if (frozen == 0) {
      frozen_features_.emplace_back(0, enc.dim());
      continue;
    }
    Matrix tokens(frozen, vocab.d_tok());
    for (std::size_t i = 0; i < frozen; ++i) {
      const Vector& e = vocab.embedding(p.tokens[bank_size + i].index);
      std::copy(e.begin(), e.end(), tokens.row_span(i).begin());
    }
    frozen_features_.push_back(enc.token_features(tokens, bank_size));
  }
}

ad::Var PromptSet::encode(ad::Var bank) const {
  if (bank.rows() != bank_size_) fail(ErrorKind::DimensionMismatch, "bank size changed");
  if (prompts_.empty()) fail(ErrorKind::EmptySequence, "empty prompt set");
  ad::Tape& t = *bank.tape();
  std::vector<ad::Var> pooled;
  pooled.reserve(prompts_.size());
  if (bank_size_ == 0) {
    for (const Matrix& f : frozen_features_) pooled.push_back(ad::mean_rows(t.constant(f)));
  } else {
    const ad::Var soft = enc_->token_features(bank, 0);
    for (const Matrix& f : frozen_features_) {
      pooled.push_back(f.rows() == 0 ? ad::mean_rows(soft)
                                     : ad::mean_rows(ad::concat_rows({soft, t.constant(f)})));
    }
  }
  return enc_->project(ad::concat_rows(pooled));
}

Matrix PromptSet::encode(const SoftPromptBank& bank) const {
  ad::Tape t;
  return encode(t.constant(bank.values)).value();
}

}  // namespace argue
