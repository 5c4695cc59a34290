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

#include "argue/encoder.hpp"

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/random.hpp"
#include "json_util.hpp"

namespace argue {

using detail::json;

Vocabulary::Vocabulary(std::uint64_t seed, std::size_t d_tok) : seed_(seed), d_tok_(d_tok) {
  if (d_tok == 0) fail(ErrorKind::DimensionMismatch, "d_tok must be positive");
  texts_.push_back("<pad>");
  embeddings_.push_back(Vector(d_tok, 0.0));
}

std::size_t Vocabulary::add(std::string text, Vector embedding) {
  // Phrases with inner spaces are allowed: a planted attribute phrase is one
  // token, reachable by exact lookup rather than through tokenize.
  if (text.empty() || std::isspace(static_cast<unsigned char>(text.front())) ||
      std::isspace(static_cast<unsigned char>(text.back()))) {
    fail(ErrorKind::InvalidSpec, "token text must be non-empty and trimmed: '" + text + "'");
  }
  if (index_.count(text) || text == texts_.front()) fail(ErrorKind::DuplicateToken, text);
  if (embedding.size() != d_tok_) {
    fail(ErrorKind::DimensionMismatch, "embedding for '" + text + "' has wrong dimension");
  }
  if (!all_finite(embedding.span())) fail(ErrorKind::InvalidSpec, "non-finite embedding: " + text);
  const std::size_t id = texts_.size();
  index_.emplace(text, id);
  texts_.push_back(std::move(text));
  embeddings_.push_back(std::move(embedding));
  return id;
}

bool Vocabulary::contains(std::string_view text) const {
  return index_.count(std::string(text)) > 0;
}

std::size_t Vocabulary::id(std::string_view text) const {
  auto it = index_.find(std::string(text));
  if (it == index_.end()) fail(ErrorKind::UnknownToken, std::string(text));
  return it->second;
}

const std::string& Vocabulary::text(std::size_t id) const {
  if (id >= texts_.size()) fail(ErrorKind::IndexOutOfRange, "token id " + std::to_string(id));
  return texts_[id];
}

const Vector& Vocabulary::embedding(std::size_t id) const {
  if (id >= embeddings_.size()) fail(ErrorKind::IndexOutOfRange, "token id " + std::to_string(id));
  return embeddings_[id];
}

std::string Vocabulary::to_json() const {
  json tokens = json::array();
  for (std::size_t i = 1; i < texts_.size(); ++i) {
    tokens.push_back({{"id", i}, {"text", texts_[i]}, {"embedding", detail::to_json(embeddings_[i])}});
  }
  json j = {{"version", kFormatVersion}, {"seed", seed_}, {"d_tok", d_tok_}, {"tokens", tokens}};
  return j.dump() + "\n";
}

Vocabulary Vocabulary::from_json(std::string_view text) {
  const json j = detail::parse_json(text, ErrorKind::SchemaViolation, "vocabulary");
  return detail::guarded(ErrorKind::SchemaViolation, "vocabulary", [&] {
    if (j.at("version").get<int>() != kFormatVersion) {
      fail(ErrorKind::VersionMismatch, "vocabulary version " + j.at("version").dump());
    }
    Vocabulary v(j.at("seed").get<std::uint64_t>(), j.at("d_tok").get<std::size_t>());
    for (const auto& t : j.at("tokens")) {
      const std::size_t id = v.add(t.at("text").get<std::string>(),
                                   detail::vector_from_json(t.at("embedding")));
      if (id != t.at("id").get<std::size_t>()) {
        fail(ErrorKind::SchemaViolation, "token ids must be dense and ordered from 1");
      }
    }
    return v;
  });
}

void Vocabulary::save(const std::filesystem::path& path) const { write_text(path, to_json()); }

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return from_json(read_text(path));
}

std::string Vocabulary::hash() const { return sha256_hex(to_json()); }

bool Vocabulary::operator==(const Vocabulary& other) const {
  return seed_ == other.seed_ && d_tok_ == other.d_tok_ && texts_ == other.texts_ &&
         embeddings_ == other.embeddings_;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

Vocabulary build_vocabulary(const VocabularySpec& spec, std::uint64_t seed, std::size_t d_tok) {
  if (spec.class_names.empty()) fail(ErrorKind::EmptySpec, "no class names");
  Vocabulary vocab(seed, d_tok);
  Rng rng(seed);
  auto fresh = [&] { return l2_normalize(gaussian_vector(d_tok, rng)); };

  std::unordered_set<std::string> reserved;
  auto add_unique = [&](const std::vector<std::string>& items) {
    for (const auto& item : items) {
      const auto words = split_words(item);
      if (words.empty()) fail(ErrorKind::EmptySpec, "blank entry");
      for (const auto& w : words) {
        if (vocab.contains(w)) fail(ErrorKind::DuplicateToken, w);
        reserved.insert(w);
        vocab.add(w, fresh());
      }
    }
  };
  add_unique(spec.class_names);
  add_unique(spec.negatives);

  auto add_shared = [&](const std::vector<std::string>& items) {
    for (const auto& item : items) {
      for (const auto& w : split_words(item)) {
        if (reserved.count(w)) fail(ErrorKind::DuplicateToken, w);
        if (!vocab.contains(w)) vocab.add(w, fresh());
      }
    }
  };
  add_shared(spec.template_words);
  add_shared(spec.attributes);
  return vocab;
}

std::vector<std::size_t> tokenize(std::string_view text, const Vocabulary& vocab,
                                  std::size_t max_length) {
  std::vector<std::size_t> ids;
  for (const auto& w : split_words(text)) ids.push_back(vocab.id(w));
  if (ids.size() > max_length) {
    fail(ErrorKind::SequenceTooLong, std::to_string(ids.size()) + " tokens > " +
                                         std::to_string(max_length));
  }
  return ids;
}

// ---------------------------------------------------------------------------

namespace {

Matrix transposed(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

Matrix scaled(Matrix m, double s) {
  for (std::size_t i = 0; i < m.size(); ++i) m[i] *= s;
  return m;
}

}  // namespace

TextEncoder::TextEncoder(const TextEncoderConfig& config) : config_(config) {
  if (config.d_tok == 0 || config.dim == 0 || config.max_length == 0) {
    fail(ErrorKind::InvalidConfig, "text encoder dimensions must be positive");
  }
  Rng rng(config.seed);
  w1t_ = transposed(scaled(random_orthogonal(config.dim, config.d_tok, rng), config.input_gain));
  b1_ = gaussian_matrix(1, config.dim, rng, config.bias_std);
  w2t_ = transposed(scaled(random_orthogonal(config.dim, config.dim, rng), config.output_gain));
  b2_ = gaussian_matrix(1, config.dim, rng, config.bias_std);

  pos_ = Matrix(config.max_length, config.d_tok);
  for (std::size_t i = 0; i < config.max_length; ++i) {
    for (std::size_t k = 0; k < config.d_tok; ++k) {
      const double rate =
          std::pow(10000.0, 2.0 * static_cast<double>(k / 2) / static_cast<double>(config.d_tok));
      const double angle = static_cast<double>(i) / rate;
      pos_(i, k) = config.position_amplitude * (k % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
}

void TextEncoder::check_sequence(std::size_t rows, std::size_t cols, std::size_t offset) const {
  if (rows == 0) fail(ErrorKind::EmptySequence, "text encoder needs at least one token");
  if (offset + rows > config_.max_length) {
    fail(ErrorKind::SequenceTooLong, std::to_string(offset + rows) + " tokens > " +
                                         std::to_string(config_.max_length));
  }
  if (cols != config_.d_tok) fail(ErrorKind::DimensionMismatch, "token dimension != d_tok");
}

ad::Var TextEncoder::token_features(ad::Var tokens, std::size_t offset) const {
  check_sequence(tokens.rows(), tokens.cols(), offset);
  ad::Tape& t = *tokens.tape();
  Matrix pos(tokens.rows(), config_.d_tok);
  for (std::size_t i = 0; i < tokens.rows(); ++i) {
    auto src = pos_.row_span(offset + i);
    std::copy(src.begin(), src.end(), pos.row_span(i).begin());
  }
  ad::Var x = ad::add(tokens, t.constant(std::move(pos)));
  return ad::tanh(ad::add_row(ad::matmul(x, t.constant(w1t_)), t.constant(b1_)));
}

Matrix TextEncoder::token_features(const Matrix& tokens, std::size_t offset) const {
  ad::Tape t;
  return token_features(t.constant(tokens), offset).value();
}

ad::Var TextEncoder::project(ad::Var pooled) const {
  if (pooled.cols() != config_.dim) fail(ErrorKind::DimensionMismatch, "pooled width != dim");
  ad::Tape& t = *pooled.tape();
  ad::Var z = ad::add_row(ad::matmul(pooled, t.constant(w2t_)), t.constant(b2_));
  return ad::normalize_rows(ad::tanh(z));
}

ad::Var TextEncoder::encode(ad::Var tokens) const {
  return project(ad::mean_rows(token_features(tokens, 0)));
}

Vector TextEncoder::encode(const Matrix& tokens) const {
  check_sequence(tokens.rows(), tokens.cols(), 0);
  ad::Tape t;
  return encode(t.constant(tokens)).value().row_vector(0);
}

Vector TextEncoder::encode(const std::vector<Vector>& tokens) const {
  if (tokens.empty()) fail(ErrorKind::EmptySequence, "text encoder needs at least one token");
  return encode(Matrix::from_rows(tokens));
}

Vector TextEncoder::inverse_direction(const Vector& target) const {
  if (target.size() != config_.dim) fail(ErrorKind::DimensionMismatch, "target width != dim");
  // (W2 W1) = (w1t w2t)^T
  Eigen::MatrixXd m(config_.dim, config_.d_tok);
  for (std::size_t r = 0; r < config_.dim; ++r)
    for (std::size_t c = 0; c < config_.d_tok; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < config_.dim; ++k) s += w1t_(c, k) * w2t_(k, r);
      m(r, c) = s;
    }
  Eigen::VectorXd t(config_.dim);
  for (std::size_t i = 0; i < config_.dim; ++i) t(i) = target[i];
  const Eigen::VectorXd x = m.colPivHouseholderQr().solve(t);
  Vector out(config_.d_tok);
  for (std::size_t i = 0; i < config_.d_tok; ++i) out[i] = x(i);
  return out;
}

// ---------------------------------------------------------------------------

ImageEncoder::ImageEncoder(const ImageEncoderConfig& config) : config_(config) {
  if (config.features == 0 || config.dim == 0) {
    fail(ErrorKind::InvalidConfig, "image encoder dimensions must be positive");
  }
  Rng rng(config.seed);
  weights_ = Matrix(config.dim, config.features);
  if (config.blocks.empty()) {
    weights_ = gaussian_matrix(config.dim, config.features, rng,
                               1.0 / std::sqrt(static_cast<double>(config.features)));
  } else {
    std::size_t total = 0;
    for (std::size_t b : config.blocks) total += b;
    if (total != config.features || total > config.dim) {
      fail(ErrorKind::InvalidConfig, "image blocks must sum to features and fit in dim");
    }
    std::size_t offset = 0;
    for (std::size_t b : config.blocks) {
      const Matrix q = random_orthogonal(b, b, rng);
      for (std::size_t r = 0; r < b; ++r)
        for (std::size_t c = 0; c < b; ++c) weights_(offset + r, offset + c) = q(r, c);
      offset += b;
    }
  }
  bias_ = gaussian_vector(config.dim, rng, config.bias_std);
}

Vector ImageEncoder::map_direction(const Vector& features) const {
  if (features.size() != config_.features) {
    fail(ErrorKind::DimensionMismatch, "image features have wrong dimension");
  }
  return matvec(weights_, features);
}

Vector ImageEncoder::encode(const Vector& features) const {
  Vector y = map_direction(features);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias_[i];
  return l2_normalize(y);
}

Matrix ImageEncoder::encode_rows(const Matrix& features) const {
  Matrix out(features.rows(), config_.dim);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const Vector e = encode(features.row_vector(r));
    std::copy(e.begin(), e.end(), out.row_span(r).begin());
  }
  return out;
}

}  // namespace argue
