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

#include "caco/model.h"

#include <cmath>
#include <sstream>

#include "caco/checkpoint.h"
#include "caco/errors.h"
#include "caco/rng.h"
#include "gtest/gtest.h"

namespace caco {
namespace {

ParamSet hand_net() {
  ParamSet p{MlpSpec{{2, 2, 2}}, {}};
  p.tensors = {Tensor::matrix({{1, -1}, {2, 0.5}}), Tensor::vector({0.5, 0.25}),
               Tensor::matrix({{1, 2}, {-1, 1}}), Tensor::vector({0, -1})};
  return p;
}

TEST(MlpSpecTest, RejectsDegenerateShapes) {
  EXPECT_THROW((MlpSpec{{8, 16}}.validate()), ParameterError);
  EXPECT_THROW((MlpSpec{{8, 0, 16}}.validate()), ParameterError);
  EXPECT_THROW((MlpSpec{{8, 4, 1}}.validate()), ParameterError);
  EXPECT_NO_THROW((MlpSpec{{8, 4, 2}}.validate()));
}

TEST(InitTest, SameSeedSameParameters) {
  const MlpSpec spec{{8, 64, 64, 16}};
  EXPECT_EQ(init_params(spec, 3), init_params(spec, 3));
  EXPECT_NE(init_params(spec, 3), init_params(spec, 4));
  EXPECT_EQ(init_classifier(16, 4, 9), init_classifier(16, 4, 9));
}

TEST(InitTest, BiasesZeroWeightsWithinFanInBound) {
  const MlpSpec spec{{8, 200, 60, 16}};
  const ParamSet p = init_params(spec, 5);
  std::size_t draws = 0;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / spec.layer_widths[l]);
    EXPECT_EQ(p.weight(l).shape(),
              (Shape{spec.layer_widths[l], spec.layer_widths[l + 1]}));
    for (double w : p.weight(l).values()) {
      EXPECT_LE(std::abs(w), limit);
      ++draws;
    }
    for (double b : p.bias(l).values()) EXPECT_EQ(b, 0.0);
  }
  EXPECT_GE(draws, 10000u);
}

TEST(EncodeTest, OutputsAreUnitNorm) {
  const MlpSpec spec{{8, 32, 16}};
  const ParamSet p = init_params(spec, 1);
  Rng rng(2);
  Tensor x(Shape{50, 8});
  for (double& v : x.values()) v = 3.0 * rng.normal();
  const Tensor e = encode(p, x);
  ASSERT_EQ(e.shape(), (Shape{50, 16}));
  for (std::size_t r = 0; r < e.rows(); ++r) {
    EXPECT_NEAR(l2_norm(e.row(r)), 1.0, 1e-12);
  }
}

TEST(EncodeTest, HandSetNetwork) {
  // Hidden (1.5, 0) after ReLU, output (1.5, 2), normalized (0.6, 0.8).
  const Tensor e = encode(hand_net(), Tensor::matrix({{1, 0}}));
  EXPECT_NEAR(e[0], 0.6, 1e-15);
  EXPECT_NEAR(e[1], 0.8, 1e-15);
}

TEST(EncodeTest, InputWidthMismatchThrows) {
  EXPECT_THROW(encode(hand_net(), Tensor::matrix({{1, 0, 0}})),
               DimensionError);
}

TEST(ClassifyTest, ZeroWeightsGiveUniform) {
  const Classifier h{Tensor(Shape{3, 4}), Tensor(Shape{4})};
  const Tensor p = classify(h, Tensor::matrix({{0.6, 0.8, 0.0}}));
  for (double v : p.values()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(ClassifyTest, HandSetClassifier) {
  const Classifier h{Tensor::matrix({{1, 0}, {0, 2}}), Tensor::vector({0, 0})};
  const Tensor p = classify(h, Tensor::matrix({{0.6, 0.8}}));
  EXPECT_NEAR(p[0], 0.2689414213699951, 1e-15);
  EXPECT_NEAR(p[1], 0.7310585786300049, 1e-15);
}

TEST(ClassifyTest, RowsLieOnSimplex) {
  const Classifier h = init_classifier(16, 5, 3);
  const ParamSet p = init_params(MlpSpec{{4, 8, 16}}, 3);
  Rng rng(4);
  Tensor x(Shape{20, 4});
  for (double& v : x.values()) v = rng.normal();
  const Tensor probs = classify(h, encode(p, x));
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    double total = 0.0;
    for (double v : probs.row(r)) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

class MomentumTest : public ::testing::Test {
 protected:
  EncoderPair pair(double b) {
    EncoderPair pr = EncoderPair::from_query(init_params(spec_, 1), b);
    pr.key = init_params(spec_, 2);
    return pr;
  }
  MlpSpec spec_{{3, 5, 2}};
};

TEST_F(MomentumTest, FromQueryCopiesParameters) {
  const EncoderPair pr = EncoderPair::from_query(init_params(spec_, 1), 0.9);
  EXPECT_EQ(pr.key, pr.query);
}

TEST_F(MomentumTest, UnitMomentumFreezesKey) {
  EncoderPair pr = pair(1.0);
  const ParamSet before = pr.key;
  momentum_update(pr);
  EXPECT_EQ(pr.key, before);
}

TEST_F(MomentumTest, ZeroMomentumCopiesQuery) {
  EncoderPair pr = pair(0.0);
  momentum_update(pr);
  EXPECT_EQ(pr.key, pr.query);
}

TEST_F(MomentumTest, ScalarCase) {
  EncoderPair pr = pair(0.999);
  pr.key.tensors[0][0] = 1.0;
  pr.query.tensors[0][0] = 0.0;
  momentum_update(pr);
  EXPECT_DOUBLE_EQ(pr.key.tensors[0][0], 0.999);
}

TEST_F(MomentumTest, MatchesClosedFormAfterRepeatedUpdates) {
  for (double b : {0.0, 0.5, 0.9, 0.999, 1.0}) {
    for (int n : {1, 10, 1000}) {
      EncoderPair pr = pair(b);
      const ParamSet k0 = pr.key;
      for (int i = 0; i < n; ++i) momentum_update(pr);
      const double bn = std::pow(b, n);
      for (std::size_t t = 0; t < k0.tensors.size(); ++t) {
        for (std::size_t i = 0; i < k0.tensors[t].size(); ++i) {
          const double expected =
              bn * k0.tensors[t][i] + (1.0 - bn) * pr.query.tensors[t][i];
          EXPECT_NEAR(pr.key.tensors[t][i], expected, 1e-12)
              << "b=" << b << " n=" << n;
        }
      }
    }
  }
}

TEST_F(MomentumTest, OutOfRangeCoefficientThrows) {
  EncoderPair low = pair(-0.01), high = pair(1.01), nan = pair(std::nan(""));
  EXPECT_THROW(momentum_update(low), ParameterError);
  EXPECT_THROW(momentum_update(high), ParameterError);
  EXPECT_THROW(momentum_update(nan), ParameterError);
}

TEST(CheckpointTest, RoundTripIsExact) {
  Model m{EncoderPair::from_query(init_params(MlpSpec{{8, 64, 16}}, 1), 0.99),
          init_classifier(16, 4, 2), 17};
  m.encoders.key = init_params(MlpSpec{{8, 64, 16}}, 5);
  std::stringstream first;
  save_checkpoint(m, first);
  const Model loaded = load_checkpoint(first);
  EXPECT_EQ(loaded.encoders.query, m.encoders.query);
  EXPECT_EQ(loaded.encoders.key, m.encoders.key);
  EXPECT_EQ(loaded.classifier, m.classifier);
  EXPECT_EQ(loaded.encoders.momentum, m.encoders.momentum);
  EXPECT_EQ(loaded.seed, m.seed);

  std::stringstream second;
  save_checkpoint(loaded, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(CheckpointTest, RejectsGarbage) {
  std::stringstream in("not a checkpoint\n");
  EXPECT_THROW(load_checkpoint(in), Error);
}

}  // namespace
}  // namespace caco
