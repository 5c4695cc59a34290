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

#include "argue/error.hpp"
#include "argue/numerics.hpp"
#include "test_util.hpp"

using namespace argue;
using argue::testing::expect_error;

TEST(L2Normalize, ThreeFourFive) {
  const Vector v = l2_normalize({3.0, 4.0});
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
}

TEST(L2Normalize, AlreadyUnit) {
  EXPECT_EQ(l2_normalize({1.0, 0.0, 0.0}), (Vector{1.0, 0.0, 0.0}));
}

TEST(L2Normalize, NearZeroNormRejected) {
  expect_error(ErrorKind::NearZeroNorm, [] { l2_normalize({1e-15, 0.0}); });
}

TEST(L2Normalize, RandomVectorsAreUnit) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(1 + trial % 17);
    for (double& x : v) x = normal(rng);
    const Vector u = l2_normalize(v);
    EXPECT_NEAR(norm(u.span()), 1.0, 1e-9);
    EXPECT_NEAR(cosine_similarity(u, v), 1.0, 1e-12);
  }
}

TEST(CosineSimilarity, Examples) {
  EXPECT_DOUBLE_EQ(cosine_similarity({1, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity({2, 0}, {5, 0}), 1.0);
  // 1/sqrt(2) evaluated to 30 digits with mpmath.
  EXPECT_NEAR(cosine_similarity({1, 0}, {1, 1}), 0.707106781186547524, 1e-15);
}

TEST(CosineSimilarity, Errors) {
  expect_error(ErrorKind::DimensionMismatch, [] { cosine_similarity({1, 0}, {1, 0, 0}); });
  expect_error(ErrorKind::NearZeroNorm, [] { cosine_similarity({0, 0}, {1, 0}); });
}

TEST(CosineSimilarity, BoundedAndSymmetric) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    Vector a(8), b(8);
    for (double& x : a) x = normal(rng);
    for (double& x : b) x = normal(rng);
    const double ab = cosine_similarity(a, b);
    EXPECT_LE(std::abs(ab), 1.0 + 1e-9);
    EXPECT_DOUBLE_EQ(ab, cosine_similarity(b, a));
  }
}

TEST(Softmax, UniformForEqualLogits) {
  for (double tau : {0.01, 1.0, 7.5}) {
    const Vector p = softmax_with_temperature({0, 0, 0, 0}, tau);
    for (double x : p) EXPECT_DOUBLE_EQ(x, 0.25);
  }
}

TEST(Softmax, TwoLogits) {
  // 1 / (1 + e^-1) from mpmath.
  const Vector p = softmax_with_temperature({1, 0}, 1.0);
  EXPECT_NEAR(p[0], 0.731058578630004879, 1e-15);
  EXPECT_NEAR(p[1], 0.268941421369995121, 1e-15);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  const Vector p = softmax_with_temperature({1000, 0}, 1.0);
  EXPECT_TRUE(all_finite(p.span()));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_GE(p[1], 0.0);
  EXPECT_LT(p[1], 1e-300);
}

TEST(Softmax, NonPositiveTemperature) {
  expect_error(ErrorKind::NonPositiveTemperature, [] { softmax_with_temperature({1, 2}, 0.0); });
  expect_error(ErrorKind::NonPositiveTemperature, [] { softmax_with_temperature({1, 2}, -1.0); });
}

TEST(Softmax, SumsToOneAndShiftInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logit(-1e6, 1e6);
  std::uniform_real_distribution<double> shift(-1e3, 1e3);
  std::uniform_real_distribution<double> small(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector wide(2 + trial % 9);
    for (double& x : wide) x = logit(rng);
    const Vector p = softmax_with_temperature(wide, 1.0);
    double s = 0.0;
    for (double x : p) s += x;
    EXPECT_NEAR(s, 1.0, 1e-9);

    Vector l(2 + trial % 9);
    for (double& x : l) x = small(rng);
    const double c = shift(rng);
    Vector shifted = l;
    for (double& x : shifted) x += c;
    const Vector a = softmax_with_temperature(l, 1.0);
    const Vector b = softmax_with_temperature(shifted, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy({0.25, 0.25, 0.25, 0.25}, 0), 1.386294361119890618, 1e-15);
  EXPECT_DOUBLE_EQ(cross_entropy({0, 1, 0}, 1), 0.0);
  EXPECT_NEAR(cross_entropy({0.9, 0.1}, 1), 2.302585092994045628, 1e-14);
}

TEST(CrossEntropy, FloorAppliesToZeroProbability) {
  EXPECT_NEAR(cross_entropy({1.0, 0.0}, 1), -std::log(kProbabilityFloor), 1e-9);
}

TEST(CrossEntropy, Errors) {
  expect_error(ErrorKind::IndexOutOfRange, [] { cross_entropy({0.5, 0.5}, 2); });
  expect_error(ErrorKind::NotADistribution, [] { cross_entropy({0.5, 0.6}, 0); });
}

TEST(Entropy, Examples) {
  Vector uniform(10, 0.1);
  EXPECT_NEAR(entropy(uniform), 2.302585092994045684, 1e-14);
  EXPECT_DOUBLE_EQ(entropy({0, 0, 1}), 0.0);
  EXPECT_NEAR(entropy({0.5, 0.5}), 0.693147180559945309, 1e-15);
  expect_error(ErrorKind::NotADistribution, [] { entropy({0.7, 0.7}); });
}

TEST(Entropy, BoundedByLogOfSupport) {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> draw(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector p(2 + trial % 12);
    double s = 0.0;
    for (double& x : p) s += (x = draw(rng));
    for (double& x : p) x /= s;
    const double h = entropy(p);
    const double cap = std::log(static_cast<double>(p.size()));
    EXPECT_LE(h, cap + 1e-12);
    EXPECT_GT(cap - h, 1e-9) << "non-uniform draw reached the maximum";
  }
}
