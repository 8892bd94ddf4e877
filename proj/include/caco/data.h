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

#ifndef CACO_DATA_H_
#define CACO_DATA_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "caco/pseudo_label.h"
#include "caco/rng.h"
#include "caco/tensor.h"

namespace caco {

struct LabeledSample {
  std::vector<double> x;
  CategoryLabel y;
};

// Class c ~ N(separation * u_c, I_D) where u_c = (cos 2pi c/C, sin 2pi c/C,
// 0, ..., 0).
struct MixtureSpec {
  std::size_t num_categories = 4;
  std::size_t dim = 8;
  std::size_t n_per_class = 500;
  double separation = 3.0;

  void validate() const;
};

// x -> scale * R(angle) x + translation, R rotating the first two
// coordinates. An empty translation means zero.
struct ShiftDescriptor {
  double angle = 0.0;
  std::vector<double> translation;
  double scale = 1.0;
};

std::vector<double> class_mean(const MixtureSpec& spec, std::size_t category);
std::vector<double> apply_shift(const ShiftDescriptor& shift,
                                std::span<const double> x);

std::vector<LabeledSample> make_gaussian_mixture(const MixtureSpec& spec,
                                                 std::uint64_t seed);
std::vector<LabeledSample> make_gaussian_mixture(std::size_t num_categories,
                                                 std::size_t dim,
                                                 std::size_t n_per_class,
                                                 double separation,
                                                 std::uint64_t seed);

// Fresh draws from the mixture pushed through the shift. Labels are kept for
// evaluation only.
std::vector<LabeledSample> shift_domain(const MixtureSpec& spec,
                                        const ShiftDescriptor& shift,
                                        std::uint64_t seed);

// What the training loop may see: labeled source rows and bare target rows.
// There is deliberately no field through which target labels can be read.
struct TrainingData {
  Tensor source_x;
  std::vector<CategoryLabel> source_y;
  Tensor target_x;
  std::size_t num_categories = 0;

  std::size_t source_size() const { return source_y.size(); }
  std::size_t target_size() const { return target_x.rows(); }
};

struct DomainPair {
  MixtureSpec mixture;
  ShiftDescriptor shift;
  std::vector<LabeledSample> source;
  std::vector<LabeledSample> target;  // labels: evaluation only

  TrainingData training_view() const;
};

// Source from stream "data.source", target from stream "data.target".
DomainPair make_domain_pair(const MixtureSpec& mixture,
                            const ShiftDescriptor& shift,
                            std::uint64_t root_seed);

Tensor stack_features(std::span<const LabeledSample> samples);

enum class Variant { kBaseline, kSourceKeys, kTargetKeys, kFull };

std::string_view variant_name(Variant variant);
Variant parse_variant(std::string_view name);

struct QueryBatch {
  std::vector<std::size_t> indices;  // rows of TrainingData::target_x
  Tensor x;
};

struct KeyBatch {
  Tensor x;
  std::vector<Domain> domains;
  std::vector<std::optional<CategoryLabel>> ground_truth;  // source rows only
};

// Uniform draw of n distinct target rows.
QueryBatch sample_query_batch(const TrainingData& data, std::size_t n,
                              Rng& rng);

// kSourceKeys: n source rows. kTargetKeys: n target rows. kFull: n/2 of
// each (n must be even). Rows are distinct within each domain.
KeyBatch sample_key_batch(const TrainingData& data, std::size_t n,
                          Variant variant, Rng& rng);

// Columns x1..xD, y, domain.
void write_dataset_csv(std::ostream& out, const DomainPair& pair);
DomainPair read_dataset_csv(std::istream& in);

}  // namespace caco

#endif  // CACO_DATA_H_
