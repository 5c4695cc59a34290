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

#include "argue/autodiff.hpp"
#include "argue/error.hpp"
#include "test_util.hpp"

using namespace argue;
using namespace argue::ad;
using argue::testing::random_matrix;

namespace {

// Reduces any node to a scalar with fixed random weights so every output
// coordinate contributes to the checked gradient. The weight stream is offset
// from the input stream; identical draws would make w parallel to x and put
// normalize_rows exactly at a zero-gradient point.
Var weighted_sum(Tape& t, Var x, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL);
  Var w = t.constant(random_matrix(x.rows(), x.cols(), rng));
  return sum(mul(w, x));
}

void check(const LossBuilder& f, const Matrix& params, double tol = 1e-4,
           int line = __builtin_LINE()) {
  SCOPED_TRACE(::testing::Message() << "check at line " << line);
  const GradientReport r = gradient_check(f, params, 1e-5);
  EXPECT_LT(r.max_rel_err, tol) << "abs err " << r.max_abs_err;
}

}  // namespace

TEST(GradientCheck, HalfSquaredNorm) {
  Matrix x(1, 2);
  x[0] = 1.0;
  x[1] = 2.0;
  auto loss = [](Tape&, Var p) { return scale(sum(matmul(p, transpose(p))), 0.5); };
  const GradientReport r = gradient_check(loss, x, 1e-5);
  EXPECT_NEAR(r.analytic[0], 1.0, 1e-15);
  EXPECT_NEAR(r.analytic[1], 2.0, 1e-15);
  EXPECT_LT(r.max_rel_err, 1e-6);
}

TEST(GradientCheck, ConstantLoss) {
  Matrix x(1, 3, 0.7);
  auto loss = [](Tape& t, Var) { return t.constant(Matrix(1, 1, 4.2)); };
  const GradientReport r = gradient_check(loss, x, 1e-5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.analytic[i], 0.0);
  EXPECT_LT(r.max_abs_err, 1e-9);
}

TEST(GradientCheck, NonFiniteLossRejected) {
  Matrix x(1, 1, 1.0);
  auto loss = [](Tape& t, Var p) {
    return add(p, t.constant(Matrix(1, 1, std::numeric_limits<double>::infinity())));
  };
  argue::testing::expect_error(ErrorKind::NonFiniteLoss, [&] { gradient_check(loss, x); });
}

TEST(GradientCheck, EpsilonOutOfRange) {
  Matrix x(1, 1, 1.0);
  auto loss = [](Tape&, Var p) { return sum(p); };
  argue::testing::expect_error(ErrorKind::InvalidConfig, [&] { gradient_check(loss, x, 1e-2); });
}

// Each differentiable primitive against central differences on 20 seeds.
class OpGradient : public ::testing::TestWithParam<int> {};

TEST_P(OpGradient, AllPrimitives) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  const std::size_t n = dim(rng), m = dim(rng) + 1;
  const Matrix x = random_matrix(n, m, rng);
  const Matrix other = random_matrix(n, m, rng);
  const Matrix right = random_matrix(m, dim(rng), rng);
  const Matrix bias = random_matrix(1, m, rng);
  const Matrix col = random_matrix(n, 1, rng);

  check([&](Tape& t, Var p) { return weighted_sum(t, add(p, t.constant(other)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, sub(t.constant(other), p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, scale(p, -2.5), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, mul(p, t.constant(other)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, mul(p, p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, add_row(p, t.constant(bias)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, add_row(t.constant(x), p), seed); }, bias);
  check([&](Tape& t, Var p) { return weighted_sum(t, sub_col(p, t.constant(col)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, sub_col(t.constant(x), p), seed); }, col);
  check([&](Tape& t, Var p) { return weighted_sum(t, matmul(p, t.constant(right)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, matmul(t.constant(x), p), seed); }, right);
  check([&](Tape& t, Var p) { return weighted_sum(t, matmul(p, transpose(p)), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, tanh(p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, mean_rows(p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, normalize_rows(p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, log_softmax_rows(p), seed); }, x);
  check([&](Tape& t, Var p) { return weighted_sum(t, logsumexp_rows(p), seed); }, x);
  check(
      [&](Tape& t, Var p) {
        return weighted_sum(t, concat_rows({p, t.constant(other), tanh(p)}), seed);
      },
      x);
  check([&](Tape& t, Var p) { return weighted_sum(t, slice_rows(p, n - 1, 1), seed); }, x);
  std::vector<std::size_t> segments{1, m - 1};
  check(
      [&](Tape& t, Var p) { return weighted_sum(t, segment_logsumexp_rows(p, segments), seed); },
      x);
  std::vector<std::size_t> pick(n);
  for (std::size_t r = 0; r < n; ++r) pick[r] = (r * 7 + seed) % m;
  check([&](Tape& t, Var p) { return weighted_sum(t, gather_rows(p, pick), seed); }, x);
  check([&](Tape&, Var p) { return mean(tanh(p)); }, x);
}

INSTANTIATE_TEST_SUITE_P(Seeds, OpGradient, ::testing::Range(0, 20));

TEST(OpGradient, LargeDimensions) {
  std::mt19937_64 rng(64);
  const Matrix x = random_matrix(4, 64, rng, 0.3);
  const Matrix w = random_matrix(64, 64, rng, 0.2);
  check(
      [&](Tape& t, Var p) {
        Var h = tanh(matmul(p, t.constant(w)));
        return mean(log_softmax_rows(scale(normalize_rows(h), 10.0)));
      },
      x);
}

TEST(Tape, BackwardVisitsEachDifferentiableNodeOnce) {
  Tape t;
  Var a = t.parameter(Matrix(1, 3, 0.5));
  Var c = t.constant(Matrix(1, 3, 2.0));
  Var h = tanh(add(a, c));
  Var l = sum(add(h, h));
  t.backward(l);
  // parameter, add, tanh, add(h,h), sum
  EXPECT_EQ(t.backward_visits(), 5u);
  // d/da sum(2 tanh(a+c)) = 2 (1 - tanh^2)
  const double y = std::tanh(2.5);
  EXPECT_NEAR(t.grad(a)[0], 2.0 * (1.0 - y * y), 1e-15);
}

TEST(Tape, UnreachedParametersHaveZeroGradient) {
  Tape t;
  Var used = t.parameter(Matrix(2, 2, 1.0));
  Var unused = t.parameter(Matrix(2, 2, 3.0));
  Var l = sum(tanh(used));
  t.backward(l);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(t.grad(unused)[i], 0.0);
  // A parameter recorded after the root is never visited either.
  Var later = t.parameter(Matrix(1, 1, 1.0));
  t.backward(l);
  EXPECT_EQ(t.grad(later)[0], 0.0);
}

TEST(Tape, BackwardLeavesValuesUntouched) {
  std::mt19937_64 rng(1);
  Tape t;
  Var p = t.parameter(random_matrix(3, 4, rng));
  Var h = normalize_rows(tanh(matmul(p, t.constant(random_matrix(4, 5, rng)))));
  Var l = mean(log_softmax_rows(h));
  std::vector<Matrix> before;
  for (std::size_t i = 0; i < t.size(); ++i) before.push_back(t.node(i).value);
  t.backward(l);
  t.backward(l);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t.node(i).value, before[i]);
}

TEST(Tape, BackwardRequiresScalarRoot) {
  Tape t;
  Var p = t.parameter(Matrix(2, 1, 1.0));
  argue::testing::expect_error(ErrorKind::DimensionMismatch, [&] { t.backward(p); });
}

TEST(Tape, ShapeErrors) {
  Tape t;
  Var a = t.constant(Matrix(2, 3));
  Var b = t.constant(Matrix(3, 2));
  argue::testing::expect_error(ErrorKind::DimensionMismatch, [&] { add(a, b); });
  argue::testing::expect_error(ErrorKind::DimensionMismatch, [&] { matmul(a, a); });
  argue::testing::expect_error(ErrorKind::NearZeroNorm, [&] { normalize_rows(a); });
}
