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
#include <vector>

#include "argue/encoder.hpp"

namespace argue {

struct PoolAttribute {
  std::string text;
  bool planted = false;
  bool operator==(const PoolAttribute&) const = default;
};

struct PoolClass {
  std::string name;
  std::string type;
  std::vector<PoolAttribute> attributes;
  int source_template = 0;
  bool operator==(const PoolClass&) const = default;
};

/// Per-class candidate attributes, the offline stand-in for LLM output.
struct AttributePool {
  static constexpr int kFormatVersion = 1;
  std::string dataset;
  std::vector<PoolClass> classes;

  const PoolClass& find(std::string_view class_name) const;
  bool operator==(const AttributePool&) const = default;
};

// Trims and lowercases attribute text; rejects duplicates within a class.
AttributePool parse_pool(std::string_view json_text);
AttributePool load_pool(const std::filesystem::path& path);
std::string pool_to_json(const AttributePool& pool);
void save_pool(const AttributePool& pool, const std::filesystem::path& path);

// Token ids of one attribute: the whole text when planted, else its words.
std::vector<std::size_t> attribute_token_ids(const PoolAttribute& attr, const Vocabulary& vocab);

// encode_text of each attribute's tokens alone (no class, no template).
std::vector<Vector> embed_attributes(const AttributePool& pool, std::size_t class_index,
                                     const TextEncoder& enc, const Vocabulary& vocab);

struct Clustering {
  std::vector<std::size_t> assignment;
  std::size_t clusters = 0;   // effective N
  std::size_t requested = 0;  // N asked for
  std::size_t iterations = 0;
  std::vector<double> objective;  // after each Lloyd iteration
  Matrix centroids;

  bool clamped() const noexcept { return clusters < requested; }
};

/// Seeded k-means++ / Lloyd on Euclidean distance. N is clamped to the number
/// of distinct embeddings; an empty cluster takes the point farthest from the
/// centroid of the currently largest cluster. Of `restarts` seeded runs the
/// one with the lowest final objective is kept.
Clustering cluster_attributes(const std::vector<Vector>& embeddings, std::size_t N,
                              std::uint64_t seed, std::size_t restarts = 10);

struct SelectedAttribute {
  std::size_t pool_index = 0;
  std::string text;
  double score = 0.0;
  std::size_t cluster = 0;
  bool operator==(const SelectedAttribute&) const = default;
};

struct SampledClass {
  std::string name;
  std::vector<SelectedAttribute> selected;  // ordered by cluster id
  bool operator==(const SampledClass&) const = default;
};

struct SampledAttributes {
  static constexpr int kFormatVersion = 1;
  std::size_t clusters = 0;
  std::uint64_t seed = 0;
  std::string template_text;
  std::vector<SampledClass> classes;
  std::vector<std::string> warnings;

  const SampledClass& find(std::string_view class_name) const;
  std::string to_json() const;
  static SampledAttributes from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static SampledAttributes load(const std::filesystem::path& path);
  bool operator==(const SampledAttributes& o) const {
    return clusters == o.clusters && seed == o.seed && template_text == o.template_text &&
           classes == o.classes;
  }
};

// Mean cosine between the class's images and "template {class} {attr}" for
// every attribute of the class, in pool order.
std::vector<double> score_attributes(const PoolClass& cls, const Matrix& class_images,
                                     const DualEncoder& enc, const Vocabulary& vocab,
                                     std::string_view template_text);

// Per cluster keeps the highest-scoring attribute; ties go to the lower pool index.
SampledClass rank_and_select(const std::vector<std::size_t>& assignment, const PoolClass& cls,
                             const Matrix& class_images, const DualEncoder& enc,
                             const Vocabulary& vocab, std::string_view template_text);

// embed -> cluster -> rank_and_select for each listed class. `class_images`
// holds raw feature rows per class, aligned with `class_names`.
SampledAttributes sample_attributes(const AttributePool& pool,
                                    const std::vector<std::string>& class_names,
                                    const std::vector<Matrix>& class_images,
                                    const DualEncoder& enc, const Vocabulary& vocab,
                                    std::string_view template_text, std::size_t N,
                                    std::uint64_t seed);

}  // namespace argue
