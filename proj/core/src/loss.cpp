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

#include "argue/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "argue/error.hpp"

namespace argue {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) fail(ErrorKind::NonPositiveTemperature, "tau = " + std::to_string(tau));
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

Vector cosine_softmax(const Vector& f, const std::vector<Vector>& embeddings, double tau) {
  check_tau(tau);
  if (embeddings.empty()) fail(ErrorKind::DimensionMismatch, "no class embeddings");
  Vector logits(embeddings.size());
  for (std::size_t c = 0; c < embeddings.size(); ++c) {
    if (embeddings[c].size() != f.size()) {
      fail(ErrorKind::DimensionMismatch, "embedding width differs from image feature");
    }
    logits[c] = dot(f.span(), embeddings[c].span()) / tau;
  }
  return softmax_with_temperature(logits, 1.0);
}

}  // namespace

Vector zero_shot_distribution(const Vector& f, const std::vector<Vector>& class_embeddings,
                              double tau) {
  return cosine_softmax(f, class_embeddings, tau);
}

Vector soft_prompt_distribution(const Vector& f, const std::vector<Vector>& class_embeddings,
                                double tau) {
  return cosine_softmax(f, class_embeddings, tau);
}

Vector attribute_averaged_distribution(const Vector& f,
                                       const std::vector<std::vector<Vector>>& per_class,
                                       double tau) {
  check_tau(tau);
  if (per_class.empty()) fail(ErrorKind::EmptyAttributeSet, "no classes");
  std::vector<double> all;
  std::vector<double> class_lse;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c].empty()) {
      fail(ErrorKind::EmptyAttributeSet, "class " + std::to_string(c) + " has no attributes");
    }
    std::vector<double> logits;
    for (const Vector& w : per_class[c]) {
      if (w.size() != f.size()) fail(ErrorKind::DimensionMismatch, "embedding width");
      logits.push_back(dot(f.span(), w.span()) / tau);
    }
    class_lse.push_back(log_sum_exp(logits));
    all.insert(all.end(), logits.begin(), logits.end());
  }
  const double total = log_sum_exp(all);
  Vector p(per_class.size());
  for (std::size_t c = 0; c < p.size(); ++c) p[c] = std::exp(class_lse[c] - total);
  return p;
}

double classification_loss(const std::vector<Vector>& distributions,
                           const std::vector<std::size_t>& labels) {
  if (distributions.size() != labels.size() || distributions.empty()) {
    fail(ErrorKind::DimensionMismatch, "one label per distribution required");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) s += cross_entropy(distributions[i], labels[i]);
  return s / static_cast<double>(labels.size());
}

Vector regularization_distribution(const Vector& soft,
                                   const std::vector<std::vector<Vector>>& textual, double tau) {
  std::vector<Vector> flat;
  for (const auto& c : textual) flat.insert(flat.end(), c.begin(), c.end());
  if (flat.empty()) fail(ErrorKind::EmptyTextualSet, "no textual prompts");
  return cosine_softmax(soft, flat, tau);
}

double regularization_loss(const std::vector<std::vector<Vector>>& soft,
                           const std::vector<std::vector<Vector>>& textual, double tau) {
  if (soft.size() != textual.size()) fail(ErrorKind::DimensionMismatch, "class count differs");
  double s = 0.0;
  std::size_t index = 0;
  for (std::size_t c = 0; c < soft.size(); ++c) {
    if (soft[c].size() != textual[c].size()) {
      fail(ErrorKind::DimensionMismatch, "attribute count differs for class " + std::to_string(c));
    }
    for (const Vector& w : soft[c]) {
      s += cross_entropy(regularization_distribution(w, textual, tau), index++);
    }
  }
  if (index == 0) fail(ErrorKind::EmptyTextualSet, "no prompts");
  return s / static_cast<double>(index);
}

Vector negative_distribution(const Vector& f, const std::vector<Vector>& negative_embeddings,
                             double tau) {
  return cosine_softmax(f, negative_embeddings, tau);
}

double negative_loss(const Vector& distribution) {
  require_distribution(distribution);
  double s = 0.0;
  for (double p : distribution) s -= std::log(std::max(p, kProbabilityFloor));
  return s / static_cast<double>(distribution.size());
}

double total_loss(double l_ent, double l_reg, double l_neg, double beta, double gamma) {
  if (beta < 0.0 || gamma < 0.0) fail(ErrorKind::NegativeWeight, "beta and gamma must be >= 0");
  return l_ent + beta * l_reg + gamma * l_neg;
}

namespace ad {

Var cosine_logits(Var images, Var texts, double tau) {
  check_tau(tau);
  return scale(matmul(images, transpose(texts)), 1.0 / tau);
}

Var attribute_log_probs(Var images, Var prompts, const std::vector<std::size_t>& segments,
                        double tau) {
  Var logits = cosine_logits(images, prompts, tau);
  return sub_col(segment_logsumexp_rows(logits, segments), logsumexp_rows(logits));
}

Var classification_loss(Var log_probs, const std::vector<std::size_t>& labels) {
  return scale(mean(gather_rows(log_probs, labels)), -1.0);
}

Var regularization_loss(Var soft, Var textual, double tau) {
  if (soft.rows() != textual.rows()) {
    fail(ErrorKind::DimensionMismatch, "soft and textual prompt counts differ");
  }
  if (textual.rows() == 0) fail(ErrorKind::EmptyTextualSet, "no textual prompts");
  std::vector<std::size_t> diagonal(soft.rows());
  for (std::size_t i = 0; i < diagonal.size(); ++i) diagonal[i] = i;
  return scale(mean(gather_rows(log_softmax_rows(cosine_logits(soft, textual, tau)), diagonal)),
               -1.0);
}

Var negative_loss(Var images, Var negatives, double tau) {
  return scale(mean(log_softmax_rows(cosine_logits(images, negatives, tau))), -1.0);
}

}  // namespace ad
}  // namespace argue
