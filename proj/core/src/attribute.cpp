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

#include "argue/attribute.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <unordered_set>

#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/random.hpp"
#include "json_util.hpp"

namespace argue {

using detail::json;

const PoolClass& AttributePool::find(std::string_view class_name) const {
  for (const auto& c : classes)
    if (c.name == class_name) return c;
  fail(ErrorKind::UnknownClass, "pool has no class '" + std::string(class_name) + "'");
}

namespace {

std::string normalize_text(std::string s) {
  auto space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && space(s.back())) s.pop_back();
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

AttributePool parse_pool(std::string_view json_text) {
  const json j = detail::parse_json(json_text, ErrorKind::SchemaViolation, "pool");
  return detail::guarded(ErrorKind::SchemaViolation, "pool", [&] {
    if (!j.is_object()) fail(ErrorKind::SchemaViolation, "pool must be an object");
    if (j.at("version").get<int>() != AttributePool::kFormatVersion) {
      fail(ErrorKind::VersionMismatch, "pool version " + j.at("version").dump());
    }
    AttributePool pool;
    pool.dataset = j.at("dataset").get<std::string>();
    std::unordered_set<std::string> names;
    for (const auto& c : j.at("classes")) {
      PoolClass cls;
      cls.name = c.at("name").get<std::string>();
      if (cls.name.empty()) fail(ErrorKind::SchemaViolation, "class without a name");
      if (!names.insert(cls.name).second) {
        fail(ErrorKind::SchemaViolation, "class '" + cls.name + "' listed twice");
      }
      cls.type = c.value("type", std::string());
      cls.source_template = c.value("source_template", 0);
      const auto& attrs = c.at("attributes");
      if (!attrs.is_array()) fail(ErrorKind::SchemaViolation, "attributes must be an array");
      if (attrs.empty()) fail(ErrorKind::EmptyClass, cls.name);
      std::unordered_set<std::string> seen;
      for (const auto& a : attrs) {
        PoolAttribute attr;
        attr.text = normalize_text(a.at("text").get<std::string>());
        attr.planted = a.value("planted", false);
        if (attr.text.empty()) fail(ErrorKind::SchemaViolation, "blank attribute in " + cls.name);
        if (!seen.insert(attr.text).second) {
          fail(ErrorKind::DuplicateAttribute, "'" + attr.text + "' under " + cls.name);
        }
        cls.attributes.push_back(std::move(attr));
      }
      pool.classes.push_back(std::move(cls));
    }
    return pool;
  });
}

AttributePool load_pool(const std::filesystem::path& path) { return parse_pool(read_text(path)); }

std::string pool_to_json(const AttributePool& pool) {
  json classes = json::array();
  for (const auto& c : pool.classes) {
    json attrs = json::array();
    for (const auto& a : c.attributes) attrs.push_back({{"text", a.text}, {"planted", a.planted}});
    classes.push_back({{"name", c.name},
                       {"type", c.type},
                       {"attributes", attrs},
                       {"source_template", c.source_template}});
  }
  return detail::dump({{"version", AttributePool::kFormatVersion},
                       {"dataset", pool.dataset},
                       {"classes", classes}});
}

void save_pool(const AttributePool& pool, const std::filesystem::path& path) {
  write_text(path, pool_to_json(pool));
}

std::vector<std::size_t> attribute_token_ids(const PoolAttribute& attr, const Vocabulary& vocab) {
  if (attr.planted) return {vocab.id(attr.text)};
  return tokenize(attr.text, vocab, std::numeric_limits<std::size_t>::max());
}

namespace {

Matrix token_rows(const std::vector<std::size_t>& ids, const Vocabulary& vocab) {
  Matrix rows(ids.size(), vocab.d_tok());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Vector& e = vocab.embedding(ids[i]);
    std::copy(e.begin(), e.end(), rows.row_span(i).begin());
  }
  return rows;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

std::vector<Vector> embed_attributes(const AttributePool& pool, std::size_t class_index,
                                     const TextEncoder& enc, const Vocabulary& vocab) {
  if (class_index >= pool.classes.size()) {
    fail(ErrorKind::UnknownClass, "pool class index " + std::to_string(class_index));
  }
  std::vector<Vector> out;
  for (const auto& a : pool.classes[class_index].attributes) {
    out.push_back(enc.encode(token_rows(attribute_token_ids(a, vocab), vocab)));
  }
  return out;
}

namespace {

Clustering lloyd(const Matrix& X, std::size_t k, Rng& rng) {
  const std::size_t n = X.rows(), dim = X.cols();
  Clustering out;

  // k-means++ seeding
  Matrix cents(k, dim);
  auto set_centroid = [&](std::size_t c, std::size_t point) {
    auto src = X.row_span(point);
    std::copy(src.begin(), src.end(), cents.row_span(c).begin());
  };
  set_centroid(0, std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::vector<double> d2(n);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < c; ++j)
        best = std::min(best, squared_distance(X.row_span(i), cents.row_span(j)));
      d2[i] = best;
      total += best;
    }
    const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (r < acc) break;
    }
    set_centroid(c, pick);
  }

  auto nearest = [&](std::size_t i) {
    std::size_t best = 0;
    double bd = squared_distance(X.row_span(i), cents.row_span(0));
    for (std::size_t c = 1; c < k; ++c) {
      const double d = squared_distance(X.row_span(i), cents.row_span(c));
      if (d < bd) bd = d, best = c;
    }
    return best;
  };

  std::vector<std::size_t> assign(n, k);
  for (std::size_t iter = 0; iter < 100; ++iter) {
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = nearest(i);

    // Repair empty clusters before the update so every centroid is a mean.
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::size_t> counts(k, 0);
      for (std::size_t a : next) ++counts[a];
      if (counts[c] > 0) continue;
      const std::size_t largest =
          static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::size_t far = n;
      double fd = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (next[i] != largest) continue;
        const double d = squared_distance(X.row_span(i), cents.row_span(largest));
        if (d > fd) fd = d, far = i;
      }
      next[far] = c;
    }

    const bool stable = next == assign;
    assign = std::move(next);
    cents = Matrix(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      auto row = X.row_span(i);
      auto dst = cents.row_span(assign[i]);
      for (std::size_t d = 0; d < dim; ++d) dst[d] += row[d];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (double& v : cents.row_span(c)) v /= static_cast<double>(counts[c]);

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += squared_distance(X.row_span(i), cents.row_span(assign[i]));
    out.objective.push_back(obj);
    out.iterations = iter + 1;
    if (stable) break;
  }
  out.assignment = std::move(assign);
  out.centroids = std::move(cents);
  return out;
}

}  // namespace

Clustering cluster_attributes(const std::vector<Vector>& embeddings, std::size_t N,
                              std::uint64_t seed, std::size_t restarts) {
  const std::size_t n = embeddings.size();
  if (n == 0) fail(ErrorKind::TooFewPoints, "no embeddings to cluster");
  if (N == 0) fail(ErrorKind::InvalidConfig, "cluster count must be at least 1");
  const std::size_t dim = embeddings.front().size();
  for (const auto& e : embeddings)
    if (e.size() != dim) fail(ErrorKind::DimensionMismatch, "ragged embeddings");

  std::set<std::vector<double>> distinct;
  for (const auto& e : embeddings) distinct.insert(e.values());

  Clustering out;
  out.requested = N;
  out.clusters = std::min(N, distinct.size());
  const std::size_t k = out.clusters;
  if (restarts == 0) fail(ErrorKind::InvalidConfig, "need at least one k-means run");
  const Matrix X = Matrix::from_rows(embeddings);

  // Independent k-means++ starts from one seeded stream; the lowest final
  // objective wins, earlier run on ties.
  Rng rng(seed);
  for (std::size_t r = 0; r < restarts; ++r) {
    Clustering run = lloyd(X, k, rng);
    if (r == 0 || run.objective.back() < out.objective.back()) {
      run.requested = out.requested;
      run.clusters = out.clusters;
      out = std::move(run);
    }
  }
  return out;
}

std::vector<double> score_attributes(const PoolClass& cls, const Matrix& class_images,
                                     const DualEncoder& enc, const Vocabulary& vocab,
                                     std::string_view template_text) {
  if (class_images.rows() == 0) fail(ErrorKind::NoImages, "class " + cls.name);
  const Matrix feats = enc.image.encode_rows(class_images);
  std::vector<std::size_t> prefix = tokenize(template_text, vocab, enc.text.max_length());
  for (std::size_t id : tokenize(cls.name, vocab, enc.text.max_length())) prefix.push_back(id);

  std::vector<double> scores;
  for (const auto& a : cls.attributes) {
    auto ids = prefix;
    for (std::size_t id : attribute_token_ids(a, vocab)) ids.push_back(id);
    const Vector t = enc.text.encode(token_rows(ids, vocab));
    double s = 0.0;
    for (std::size_t r = 0; r < feats.rows(); ++r) s += dot(feats.row_span(r), t.span());
    scores.push_back(s / static_cast<double>(feats.rows()));
  }
  return scores;
}

SampledClass rank_and_select(const std::vector<std::size_t>& assignment, const PoolClass& cls,
                             const Matrix& class_images, const DualEncoder& enc,
                             const Vocabulary& vocab, std::string_view template_text) {
  if (assignment.size() != cls.attributes.size()) {
    fail(ErrorKind::DimensionMismatch, "assignment does not cover the class pool");
  }
  const std::vector<double> scores =
      score_attributes(cls, class_images, enc, vocab, template_text);
  std::size_t clusters = 0;
  for (std::size_t a : assignment) clusters = std::max(clusters, a + 1);

  SampledClass out;
  out.name = cls.name;
  for (std::size_t c = 0; c < clusters; ++c) {
    std::size_t best = assignment.size();
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != c) continue;
      if (best == assignment.size() || scores[i] > scores[best]) best = i;
    }
    if (best == assignment.size()) continue;  // empty cluster id
    out.selected.push_back({best, cls.attributes[best].text, scores[best], c});
  }
  return out;
}

SampledAttributes sample_attributes(const AttributePool& pool,
                                    const std::vector<std::string>& class_names,
                                    const std::vector<Matrix>& class_images,
                                    const DualEncoder& enc, const Vocabulary& vocab,
                                    std::string_view template_text, std::size_t N,
                                    std::uint64_t seed) {
  if (class_names.size() != class_images.size()) {
    fail(ErrorKind::DimensionMismatch, "one image set per class required");
  }
  SampledAttributes out;
  out.clusters = N;
  out.seed = seed;
  out.template_text = std::string(template_text);
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const PoolClass& cls = pool.find(class_names[c]);
    const std::size_t index = static_cast<std::size_t>(&cls - pool.classes.data());
    const auto emb = embed_attributes(pool, index, enc.text, vocab);
    const Clustering cl = cluster_attributes(emb, N, derive_seed(seed, c));
    if (cl.clamped()) {
      out.warnings.push_back("class " + cls.name + ": N=" + std::to_string(N) +
                             " clamped to " + std::to_string(cl.clusters) +
                             " distinct attribute embeddings");
    }
    out.classes.push_back(
        rank_and_select(cl.assignment, cls, class_images[c], enc, vocab, template_text));
  }
  return out;
}

// --- sampled attribute files ---------------------------------------------------

const SampledClass& SampledAttributes::find(std::string_view class_name) const {
  for (const auto& c : classes)
    if (c.name == class_name) return c;
  fail(ErrorKind::UnknownClass, "no sampled attributes for '" + std::string(class_name) + "'");
}

std::string SampledAttributes::to_json() const {
  json cls = json::array();
  for (const auto& c : classes) {
    json sel = json::array();
    for (const auto& s : c.selected) {
      sel.push_back({{"text", s.text},
                     {"pool_index", s.pool_index},
                     {"cluster", s.cluster},
                     {"score", s.score}});
    }
    cls.push_back({{"name", c.name}, {"selected", sel}});
  }
  return detail::dump({{"version", kFormatVersion},
                       {"clusters", clusters},
                       {"seed", seed},
                       {"template", template_text},
                       {"classes", cls}});
}

SampledAttributes SampledAttributes::from_json(std::string_view text) {
  const json j = detail::parse_json(text, ErrorKind::SchemaViolation, "sampled attributes");
  return detail::guarded(ErrorKind::SchemaViolation, "sampled attributes", [&] {
    if (j.at("version").get<int>() != kFormatVersion) {
      fail(ErrorKind::VersionMismatch, "sampled attributes version " + j.at("version").dump());
    }
    SampledAttributes s;
    s.clusters = j.at("clusters").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.template_text = j.at("template").get<std::string>();
    for (const auto& c : j.at("classes")) {
      SampledClass sc;
      sc.name = c.at("name").get<std::string>();
      for (const auto& a : c.at("selected")) {
        sc.selected.push_back({a.at("pool_index").get<std::size_t>(),
                               a.at("text").get<std::string>(), a.at("score").get<double>(),
                               a.at("cluster").get<std::size_t>()});
      }
      s.classes.push_back(std::move(sc));
    }
    return s;
  });
}

void SampledAttributes::save(const std::filesystem::path& path) const {
  write_text(path, to_json());
}

SampledAttributes SampledAttributes::load(const std::filesystem::path& path) {
  return from_json(read_text(path));
}

}  // namespace argue
