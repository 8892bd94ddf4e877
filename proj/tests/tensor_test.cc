// Copyright 2026 The CaCo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "caco/tensor.h"

#include <cmath>

#include "caco/errors.h"
#include "gtest/gtest.h"

namespace caco {
namespace {

// Reference product, kept separate from the kernel's loop order.
Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor c(Shape{a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < a.cols(); ++t) s += a.at(i, t) * b.at(t, j);
      c.at(i, j) = s;
    }
  return c;
}

TEST(TensorTest, ShapeMustMatchValueCount) {
  EXPECT_THROW(Tensor(Shape{2, 3}, std::vector<double>(5)), DimensionError);
  EXPECT_THROW(Tensor(Shape{0}), DimensionError);
  const Tensor t(Shape{2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
}

TEST(MatmulTest, IdentityLeavesMatrixUnchanged) {
  const Tensor eye = Tensor::matrix({{1, 0}, {0, 1}});
  const Tensor m = Tensor::matrix({{5, 6}, {7, 8}});
  EXPECT_EQ(matmul(eye, m), m);
}

TEST(MatmulTest, ZeroMatrixGivesZero) {
  const Tensor zero(Shape{3, 2});
  const Tensor m = Tensor::matrix({{5, 6, 1}, {7, 8, 2}});
  EXPECT_EQ(matmul(zero, m), Tensor(Shape{3, 3}));
}

TEST(MatmulTest, MatchesNaiveOracle) {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
  const Tensor b = Tensor::matrix({{5, 6}, {7, 8}});
  const Tensor expected = Tensor::matrix({{19, 22}, {43, 50}});
  EXPECT_EQ(naive_matmul(a, b), expected);
  EXPECT_EQ(matmul(a, b), expected);
}

TEST(MatmulTest, InnerExtentMismatchThrows) {
  EXPECT_THROW(matmul(Tensor(Shape{2, 3}), Tensor(Shape{2, 3})),
               DimensionError);
}

TEST(LogSoftmaxTest, ConstantVectorGivesMinusLogN) {
  for (double tau : {0.07, 1.0, 3.0}) {
    const Tensor out = log_softmax(Tensor::vector({2.5, 2.5, 2.5, 2.5}), tau);
    for (double v : out.values()) EXPECT_NEAR(v, -std::log(4.0), 1e-15);
  }
}

TEST(LogSoftmaxTest, ShiftInvariant) {
  const Tensor v = Tensor::vector({0.3, -1.2, 2.0});
  const Tensor shifted = Tensor::vector({100.3, 98.8, 102.0});
  const Tensor a = log_softmax(v, 0.5), b = log_softmax(shifted, 0.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(LogSoftmaxTest, KnownValues) {
  // -log(e^-2 + e^-1 + 1) offsets, evaluated at 40 digits.
  const Tensor out = log_softmax(Tensor::vector({1, 2, 3}), 1.0);
  EXPECT_NEAR(out[0], -2.4076059644443803, 1e-15);
  EXPECT_NEAR(out[1], -1.4076059644443803, 1e-15);
  EXPECT_NEAR(out[2], -0.40760596444438030, 1e-15);
}

TEST(LogSoftmaxTest, ExponentialsSumToOneWithoutOverflow) {
  const Tensor out = log_softmax(Tensor::vector({1.0, -1.0, 0.5, 0.9}), 0.07);
  double total = 0.0;
  for (double v : out.values()) total += std::exp(v);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_TRUE(log_softmax(Tensor::vector({800.0, 0.0}), 0.07).all_finite());
}

TEST(LogSoftmaxTest, NonPositiveTauThrows) {
  EXPECT_THROW(log_softmax(Tensor::vector({1, 2}), 0.0), ParameterError);
  EXPECT_THROW(log_softmax(Tensor::vector({1, 2}), -1.0), ParameterError);
}

TEST(L2NormalizeTest, UnitVectorUnchanged) {
  const Tensor v = Tensor::vector({0.0, 1.0, 0.0});
  EXPECT_EQ(l2_normalize(v), v);
}

TEST(L2NormalizeTest, ThreeFourFive) {
  const Tensor out = l2_normalize(Tensor::vector({3, 4}));
  EXPECT_NEAR(out[0], 0.6, 1e-15);
  EXPECT_NEAR(out[1], 0.8, 1e-15);
}

TEST(L2NormalizeTest, ZeroVectorIsDegenerate) {
  EXPECT_THROW(l2_normalize(Tensor::vector({0, 0})), DegenerateEmbeddingError);
}

TEST(L2NormalizeTest, RowsComeOutUnitNorm) {
  const Tensor m = Tensor::matrix({{1e-3, 2e-3, -5e-4}, {1e6, -3e6, 2.5}});
  const Tensor out = l2_normalize(m);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    EXPECT_NEAR(l2_norm(out.row(r)), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace caco
