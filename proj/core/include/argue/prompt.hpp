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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argue/autodiff.hpp"
#include "argue/encoder.hpp"

namespace argue {

/// The M learnable context vectors shared by every class, attribute and
/// negative prompt. The only trainable state in the lab.
struct SoftPromptBank {
  Matrix values;  // M x d_tok
  std::string init;

  std::size_t size() const noexcept { return values.rows(); }
  bool operator==(const SoftPromptBank&) const = default;
};

// Copies the embeddings of `phrase` (must have exactly M words), or draws
// N(0, 0.02^2) entries when the phrase is empty.
SoftPromptBank init_soft_prompts(const Vocabulary& vocab, std::size_t M, std::string_view phrase,
                                 std::uint64_t seed);

/// Class names, attribute strings and negative attribute strings resolved to
/// token ids. Attribute strings are deduplicated: a string shared by several
/// classes maps to one attribute id.
class Lexicon {
 public:
  explicit Lexicon(const Vocabulary& vocab) : vocab_(&vocab) {}

  std::size_t add_class(const std::string& name);
  // A planted attribute is a single vocabulary entry even if it contains spaces.
  std::size_t add_attribute(const std::string& text, bool planted = false);
  std::size_t add_negative(const std::string& text);

  const std::vector<std::size_t>& class_tokens(std::size_t class_id) const;
  const std::vector<std::size_t>& attribute_tokens(std::size_t attribute_id) const;
  const std::vector<std::size_t>& negative_tokens(std::size_t negative_id) const;

  std::size_t class_id(std::string_view name) const;
  std::size_t attribute_id(std::string_view text) const;
  std::size_t negative_id(std::string_view text) const;

  const std::string& class_name(std::size_t class_id) const;
  const std::string& attribute_text(std::size_t attribute_id) const;
  std::size_t class_count() const noexcept { return classes_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }
  std::size_t negative_count() const noexcept { return negatives_.size(); }
  const Vocabulary& vocab() const noexcept { return *vocab_; }

 private:
  struct Entry {
    std::string text;
    std::vector<std::size_t> tokens;
  };
  const Vocabulary* vocab_;
  std::vector<Entry> classes_, attributes_, negatives_;
  std::unordered_map<std::string, std::size_t> class_index_, attribute_index_, negative_index_;
};

enum class PromptKind { AttributeGuided, Negative, Textual };

struct TokenRef {
  bool soft = false;
  std::size_t index = 0;  // bank row if soft, vocabulary id otherwise
  bool operator==(const TokenRef&) const = default;
};

struct PromptAssembly {
  PromptKind kind = PromptKind::Textual;
  std::vector<TokenRef> tokens;
  std::size_t class_id = 0;
  std::optional<std::size_t> attribute_id;
  std::optional<std::size_t> negative_id;

  std::size_t length() const noexcept { return tokens.size(); }
  std::size_t soft_count() const;
  bool operator==(const PromptAssembly&) const = default;
};

// [p_1..p_M, e_c, v_c^j]; without an attribute this is the plain soft prompt
// [p_1..p_M, e_c] of vanilla prompt tuning.
PromptAssembly assemble_attribute_prompt(const SoftPromptBank& bank, const Lexicon& lex,
                                         std::size_t class_id,
                                         std::optional<std::size_t> attribute_id,
                                         std::size_t max_length);
// [p_1..p_M, v_0, e_c]: the negative attribute comes BEFORE the class name.
PromptAssembly assemble_negative_prompt(const SoftPromptBank& bank, const Lexicon& lex,
                                        std::size_t class_id, std::size_t negative_id,
                                        std::size_t max_length);
// "template {class} {attr}", fully frozen.
PromptAssembly assemble_textual_prompt(std::string_view template_text, const Lexicon& lex,
                                       std::size_t class_id,
                                       std::optional<std::size_t> attribute_id,
                                       std::size_t max_length);

// Token vectors of an assembly with the bank's current values.
Matrix materialize(const PromptAssembly& prompt, const SoftPromptBank& bank,
                   const Vocabulary& vocab);

// Reference path: one prompt, soft rows taken from `bank` (a tape node M x d_tok).
ad::Var encode_prompt(const TextEncoder& enc, const Vocabulary& vocab, ad::Var bank,
                      const PromptAssembly& prompt);
Vector encode_prompt(const TextEncoder& enc, const Vocabulary& vocab, const SoftPromptBank& bank,
                     const PromptAssembly& prompt);

/// Encodes a fixed list of prompts whose soft tokens form the prefix
/// p_1..p_M. The frozen tokens' first-layer features are computed once here;
/// per step only the M soft rows pass through the first layer. Produces the
/// same embeddings as encode_prompt.
class PromptSet {
 public:
  PromptSet(const TextEncoder& enc, const Vocabulary& vocab, std::vector<PromptAssembly> prompts,
            std::size_t bank_size);

  // (prompts x dim) unit embeddings, differentiable w.r.t. `bank`.
  ad::Var encode(ad::Var bank) const;
  Matrix encode(const SoftPromptBank& bank) const;

  std::size_t size() const noexcept { return prompts_.size(); }
  const std::vector<PromptAssembly>& prompts() const noexcept { return prompts_; }

 private:
  const TextEncoder* enc_;
  std::size_t bank_size_;
  std::vector<PromptAssembly> prompts_;
  std::vector<Matrix> frozen_features_;
};

}  // namespace argue
