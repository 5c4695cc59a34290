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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argue/autodiff.hpp"
#include "argue/numerics.hpp"

namespace argue {

/// Closed word-level vocabulary. Id 0 is PAD (never emitted by tokenize);
/// every other id maps to exactly one token string and one embedding row.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr int kFormatVersion = 1;

  Vocabulary(std::uint64_t seed, std::size_t d_tok);

  std::size_t add(std::string text, Vector embedding);
  bool contains(std::string_view text) const;
  std::size_t id(std::string_view text) const;
  const std::string& text(std::size_t id) const;
  const Vector& embedding(std::size_t id) const;

  // Includes PAD.
  std::size_t size() const noexcept { return texts_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t d_tok() const noexcept { return d_tok_; }

  std::string to_json() const;
  static Vocabulary from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);
  // SHA-256 of the canonical JSON dump.
  std::string hash() const;

  bool operator==(const Vocabulary& other) const;

 private:
  std::uint64_t seed_;
  std::size_t d_tok_;
  std::vector<std::string> texts_;
  std::vector<Vector> embeddings_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct VocabularySpec {
  std::vector<std::string> class_names;
  std::vector<std::string> attributes;
  std::vector<std::string> negatives;
  std::vector<std::string> template_words;
};

// Free-form vocabulary: one token per distinct word, Gaussian embeddings
// scaled to unit norm. Class names and negatives must be unique; attribute
// words shared between classes collapse onto one id.
Vocabulary build_vocabulary(const VocabularySpec& spec, std::uint64_t seed, std::size_t d_tok);

std::vector<std::size_t> tokenize(std::string_view text, const Vocabulary& vocab,
                                  std::size_t max_length);
std::vector<std::string> split_words(std::string_view text);

struct TextEncoderConfig {
  std::uint64_t seed = 0;
  std::size_t d_tok = 32;
  std::size_t dim = 32;
  std::size_t max_length = 16;
  double input_gain = 1.0;
  double output_gain = 8.0;
  double position_amplitude = 0.1;
  double bias_std = 0.01;
};

/// Frozen order-aware text encoder:
///   u_i = tanh(W1 (x_i + pos_i) + b1), h = mean_i u_i,
///   out = normalize(tanh(W2 h + b2)).
/// Differentiable with respect to its input token vectors through the tape.
class TextEncoder {
 public:
  explicit TextEncoder(const TextEncoderConfig& config);

  const TextEncoderConfig& config() const noexcept { return config_; }
  std::size_t d_tok() const noexcept { return config_.d_tok; }
  std::size_t dim() const noexcept { return config_.dim; }
  std::size_t max_length() const noexcept { return config_.max_length; }

  // Per-token first layer for tokens placed at positions offset.. offset+n-1.
  ad::Var token_features(ad::Var tokens, std::size_t offset) const;
  Matrix token_features(const Matrix& tokens, std::size_t offset) const;
  // Pooled rows (k x dim) -> unit embeddings (k x dim).
  ad::Var project(ad::Var pooled) const;

  ad::Var encode(ad::Var tokens) const;
  Vector encode(const Matrix& tokens) const;
  Vector encode(const std::vector<Vector>& tokens) const;

  // Token vector whose first-order contribution to the pre-activation output
  // points along `target` (least squares through W2 W1).
  Vector inverse_direction(const Vector& target) const;

  const Matrix& positions() const noexcept { return pos_; }

 private:
  void check_sequence(std::size_t rows, std::size_t cols, std::size_t offset) const;

  TextEncoderConfig config_;
  Matrix w1t_;  // d_tok x dim
  Matrix b1_;   // 1 x dim
  Matrix w2t_;  // dim x dim
  Matrix b2_;   // 1 x dim
  Matrix pos_;  // max_length x d_tok
};

struct ImageEncoderConfig {
  std::uint64_t seed = 1;
  std::size_t features = 24;
  std::size_t dim = 32;
  // Empty: dense Gaussian map. Otherwise block sizes summing to `features`;
  // each block gets its own random orthogonal map onto consecutive output
  // coordinates, keeping blocks separable in the shared space.
  std::vector<std::size_t> blocks;
  double bias_std = 0.01;
};

/// Frozen affine map followed by unit normalization.
class ImageEncoder {
 public:
  explicit ImageEncoder(const ImageEncoderConfig& config);

  const ImageEncoderConfig& config() const noexcept { return config_; }
  std::size_t features() const noexcept { return config_.features; }
  std::size_t dim() const noexcept { return config_.dim; }

  Vector encode(const Vector& features) const;
  Matrix encode_rows(const Matrix& features) const;
  // Linear part only (no bias, no normalization).
  Vector map_direction(const Vector& features) const;
  const Matrix& weights() const noexcept { return weights_; }

 private:
  ImageEncoderConfig config_;
  Matrix weights_;  // dim x features
  Vector bias_;
};

struct DualEncoder {
  TextEncoder text;
  ImageEncoder image;
};

}  // namespace argue
