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

#include "argue/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "argue/error.hpp"

namespace argue {

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      fail(ErrorKind::DimensionMismatch, "ragged rows in Matrix::from_rows");
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row_span(r).begin());
  }
  return m;
}

Matrix Matrix::column(const Vector& v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

Matrix Matrix::row(const Vector& v) {
  Matrix m(1, v.size());
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

Vector Matrix::row_vector(std::size_t r) const {
  auto s = row_span(r);
  return Vector(std::vector<double>(s.begin(), s.end()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::DimensionMismatch,
         "dot of sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector l2_normalize(const Vector& v) {
  const double n = norm(v.span());
  if (!(n > kNormEpsilon)) fail(ErrorKind::NearZeroNorm, "cannot normalize vector");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::DimensionMismatch, "cosine of unequal dimensions");
  }
  const double na = norm(a.span());
  const double nb = norm(b.span());
  if (!(na > kNormEpsilon) || !(nb > kNormEpsilon)) {
    fail(ErrorKind::NearZeroNorm, "cosine with a near-zero vector");
  }
  return std::clamp(dot(a.span(), b.span()) / (na * nb), -1.0, 1.0);
}

Vector softmax_with_temperature(const Vector& logits, double temperature) {
  if (!(temperature > 0.0)) {
    fail(ErrorKind::NonPositiveTemperature, "temperature must be positive");
  }
  if (logits.empty()) fail(ErrorKind::DimensionMismatch, "softmax of empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - peak) / temperature);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

void require_distribution(const Vector& p, double tolerance) {
  if (p.empty()) fail(ErrorKind::NotADistribution, "empty distribution");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      fail(ErrorKind::NotADistribution, "negative or non-finite probability");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > tolerance) {
    fail(ErrorKind::NotADistribution, "probabilities sum to " + std::to_string(total));
  }
}

double cross_entropy(const Vector& probabilities, std::size_t target_index) {
  if (target_index >= probabilities.size()) {
    fail(ErrorKind::IndexOutOfRange, "target index " + std::to_string(target_index));
  }
  require_distribution(probabilities);
  return -std::log(std::max(probabilities[target_index], kProbabilityFloor));
}

double entropy(const Vector& probabilities) {
  require_distribution(probabilities);
  double h = 0.0;
  for (double x : probabilities) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return std::max(h, 0.0);
}

Vector matvec(const Matrix& w, const Vector& x) {
  if (w.cols() != x.size()) fail(ErrorKind::DimensionMismatch, "matvec");
  Vector out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = dot(w.row_span(r), x.span());
  return out;
}

}  // namespace argue
