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

#include "caco/data.h"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "caco/errors.h"
#include "gtest/gtest.h"

namespace caco {
namespace {

// Training code must never see target labels.
template <typename T>
concept HasTargetLabels = requires(T d) { d.target_y; };
template <typename T>
concept HasTargetSamples = requires(T d) { d.target; };
static_assert(!HasTargetLabels<TrainingData>);
static_assert(!HasTargetSamples<TrainingData>);

ShiftDescriptor rotation(double angle) { return {angle, {}, 1.0}; }

TEST(MixtureTest, ClassMeansOnCircle) {
  const MixtureSpec spec{4, 3, 1, 2.0};
  const auto m1 = class_mean(spec, 1);
  EXPECT_NEAR(m1[0], 0.0, 1e-15);
  EXPECT_NEAR(m1[1], 2.0, 1e-15);
  EXPECT_EQ(m1[2], 0.0);
}

TEST(MixtureTest, EmpiricalMeansMatch) {
  const MixtureSpec spec{4, 8, 25000, 3.0};
  const auto samples = make_gaussian_mixture(spec, 1);
  ASSERT_EQ(samples.size(), 100000u);
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> mean(8, 0.0);
    std::size_t n = 0;
    for (const auto& s : samples) {
      if (s.y.index() != c) continue;
      ++n;
      for (std::size_t j = 0; j < 8; ++j) mean[j] += s.x[j];
    }
    ASSERT_EQ(n, 25000u);
    const auto expected = class_mean(spec, c);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(mean[j] / n, expected[j], 0.05) << "class " << c;
    }
  }
}

TEST(MixtureTest, DeterministicPerSeed) {
  const auto a = make_gaussian_mixture(3, 4, 10, 1.5, 9);
  const auto b = make_gaussian_mixture(3, 4, 10, 1.5, 9);
  const auto c = make_gaussian_mixture(3, 4, 10, 1.5, 10);
  ASSERT_EQ(a.size(), 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
  }
  EXPECT_NE(a[0].x, c[0].x);
}

TEST(MixtureTest, ZeroSeparationCentresAllClasses) {
  const MixtureSpec spec{3, 4, 1, 0.0};
  for (std::size_t c = 0; c < 3; ++c) {
    for (double v : class_mean(spec, c)) EXPECT_EQ(v, 0.0);
  }
}

TEST(MixtureTest, RejectsBadSpecs) {
  EXPECT_THROW(make_gaussian_mixture(1, 4, 10, 1.0, 0), ParameterError);
  EXPECT_THROW(make_gaussian_mixture(2, 1, 10, 1.0, 0), ParameterError);
  EXPECT_THROW(make_gaussian_mixture(2, 4, 0, 1.0, 0), ParameterError);
  EXPECT_THROW(make_gaussian_mixture(2, 4, 10, -1.0, 0), ParameterError);
}

TEST(ShiftTest, IdentityShiftLeavesDomainUnchanged) {
  const MixtureSpec spec{4, 5, 20, 3.0};
  const auto a = make_gaussian_mixture(spec, 4);
  const auto b = shift_domain(spec, ShiftDescriptor{}, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
}

TEST(ShiftTest, HalfTurnMapsMeansToAntipodes) {
  const MixtureSpec spec{4, 3, 1, 3.0};
  const ShiftDescriptor half{std::numbers::pi, {}, 1.0};
  for (std::size_t c = 0; c < 4; ++c) {
    const auto m = class_mean(spec, c);
    const auto shifted = apply_shift(half, m);
    EXPECT_NEAR(shifted[0], -m[0], 1e-12);
    EXPECT_NEAR(shifted[1], -m[1], 1e-12);
  }
}

TEST(ShiftTest, RotationScaleTranslationClosedForm) {
  const double a = std::numbers::pi / 6;
  const ShiftDescriptor shift{a, {1.0, -1.0, 0.5}, 2.0};
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto y = apply_shift(shift, x);
  EXPECT_NEAR(y[0], 2.0 * (std::cos(a) - 2.0 * std::sin(a)) + 1.0, 1e-12);
  EXPECT_NEAR(y[1], 2.0 * (std::sin(a) + 2.0 * std::cos(a)) - 1.0, 1e-12);
  EXPECT_NEAR(y[2], 6.5, 1e-12);
  EXPECT_THROW(apply_shift(ShiftDescriptor{0.0, {1.0}, 1.0}, x),
               DimensionError);
}

TEST(DomainPairTest, TrainingViewCarriesNoTargetLabels) {
  const DomainPair pair =
      make_domain_pair(MixtureSpec{4, 8, 30, 3.0}, rotation(0.5), 7);
  const TrainingData view = pair.training_view();
  EXPECT_EQ(view.source_size(), 120u);
  EXPECT_EQ(view.target_size(), 120u);
  EXPECT_EQ(view.num_categories, 4u);
}

class BatchTest : public ::testing::Test {
 protected:
  BatchTest()
      : data_(make_domain_pair(MixtureSpec{4, 3, 5, 3.0}, ShiftDescriptor{}, 1)
                  .training_view()) {}
  TrainingData data_;
};

TEST_F(BatchTest, FullQueryBatchIsPermutation) {
  Rng rng(3);
  const QueryBatch b = sample_query_batch(data_, 20, rng);
  EXPECT_EQ(std::set<std::size_t>(b.indices.begin(), b.indices.end()).size(),
            20u);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(b.x.at(i, j), data_.target_x.at(b.indices[i], j));
    }
  }
}

TEST_F(BatchTest, QueryDrawsAreUniform) {
  Rng rng(4);
  std::vector<double> counts(20, 0.0);
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    for (std::size_t idx : sample_query_batch(data_, 3, rng).indices) {
      counts[idx] += 1.0;
    }
  }
  const double expected = 3.0 * kDraws / 20.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 43.82);  // 19 dof, p = 0.001
}

TEST_F(BatchTest, OversizedQueryBatchThrows) {
  Rng rng(5);
  EXPECT_THROW(sample_query_batch(data_, 21, rng), ContractError);
  EXPECT_THROW(sample_query_batch(data_, 0, rng), ContractError);
}

TEST_F(BatchTest, KeyBatchDomainCounts) {
  Rng rng(6);
  auto count_source = [](const KeyBatch& b) {
    return std::count(b.domains.begin(), b.domains.end(), Domain::kSource);
  };
  const KeyBatch s = sample_key_batch(data_, 8, Variant::kSourceKeys, rng);
  const KeyBatch t = sample_key_batch(data_, 8, Variant::kTargetKeys, rng);
  const KeyBatch f = sample_key_batch(data_, 8, Variant::kFull, rng);
  EXPECT_EQ(count_source(s), 8);
  EXPECT_EQ(count_source(t), 0);
  EXPECT_EQ(count_source(f), 4);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(f.ground_truth[i].has_value(), f.domains[i] == Domain::kSource);
  }
  EXPECT_EQ(f.x.rows(), 8u);
}

TEST_F(BatchTest, KeyBatchContracts) {
  Rng rng(7);
  EXPECT_THROW(sample_key_batch(data_, 7, Variant::kFull, rng), ContractError);
  EXPECT_THROW(sample_key_batch(data_, 4, Variant::kBaseline, rng),
               ContractError);
}

TEST(VariantTest, NamesRoundTrip) {
  for (Variant v : {Variant::kBaseline, Variant::kSourceKeys,
                    Variant::kTargetKeys, Variant::kFull}) {
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  }
  EXPECT_THROW(parse_variant("ST"), ConfigError);
}

TEST(DatasetCsvTest, RoundTripIsExact) {
  const DomainPair pair =
      make_domain_pair(MixtureSpec{3, 4, 6, 2.0}, rotation(0.3), 2);
  std::stringstream out;
  write_dataset_csv(out, pair);
  const DomainPair back = read_dataset_csv(out);
  ASSERT_EQ(back.source.size(), pair.source.size());
  ASSERT_EQ(back.target.size(), pair.target.size());
  for (std::size_t i = 0; i < pair.source.size(); ++i) {
    EXPECT_EQ(back.source[i].x, pair.source[i].x);
    EXPECT_EQ(back.source[i].y, pair.source[i].y);
    EXPECT_EQ(back.target[i].x, pair.target[i].x);
    EXPECT_EQ(back.target[i].y, pair.target[i].y);
  }
}

}  // namespace
}  // namespace caco
