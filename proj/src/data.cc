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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "caco/errors.h"

namespace caco {

void MixtureSpec::validate() const {
  if (num_categories < 2) throw ParameterError("mixture needs C >= 2");
  if (dim < 2) throw ParameterError("mixture needs D >= 2");
  if (n_per_class == 0) throw ParameterError("mixture needs n_per_class >= 1");
  if (!(separation >= 0.0)) throw ParameterError("separation must be >= 0");
}

std::vector<double> class_mean(const MixtureSpec& spec, std::size_t category) {
  std::vector<double> mean(spec.dim, 0.0);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(category) /
                       static_cast<double>(spec.num_categories);
  mean[0] = spec.separation * std::cos(angle);
  mean[1] = spec.separation * std::sin(angle);
  return mean;
}

std::vector<double> apply_shift(const ShiftDescriptor& shift,
                                std::span<const double> x) {
  if (!shift.translation.empty() && shift.translation.size() != x.size()) {
    throw DimensionError("shift translation has " +
                         std::to_string(shift.translation.size()) +
                         " coordinates, sample has " +
                         std::to_string(x.size()));
  }
  std::vector<double> out(x.begin(), x.end());
  const double c = std::cos(shift.angle), s = std::sin(shift.angle);
  out[0] = c * x[0] - s * x[1];
  out[1] = s * x[0] + c * x[1];
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] *= shift.scale;
    if (!shift.translation.empty()) out[i] += shift.translation[i];
  }
  return out;
}

std::vector<LabeledSample> make_gaussian_mixture(const MixtureSpec& spec,
                                                 std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<LabeledSample> samples;
  samples.reserve(spec.num_categories * spec.n_per_class);
  for (std::size_t c = 0; c < spec.num_categories; ++c) {
    const std::vector<double> mean = class_mean(spec, c);
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      std::vector<double> x(spec.dim);
      for (std::size_t j = 0; j < spec.dim; ++j) x[j] = mean[j] + rng.normal();
      samples.push_back({std::move(x), CategoryLabel(c, spec.num_categories)});
    }
  }
  return samples;
}

std::vector<LabeledSample> make_gaussian_mixture(std::size_t num_categories,
                                                 std::size_t dim,
                                                 std::size_t n_per_class,
                                                 double separation,
                                                 std::uint64_t seed) {
  return make_gaussian_mixture(
      MixtureSpec{num_categories, dim, n_per_class, separation}, seed);
}

std::vector<LabeledSample> shift_domain(const MixtureSpec& spec,
                                        const ShiftDescriptor& shift,
                                        std::uint64_t seed) {
  if (!(shift.scale > 0.0)) throw ParameterError("shift scale must be > 0");
  std::vector<LabeledSample> samples = make_gaussian_mixture(spec, seed);
  for (LabeledSample& s : samples) s.x = apply_shift(shift, s.x);
  return samples;
}

Tensor stack_features(std::span<const LabeledSample> samples) {
  if (samples.empty()) throw ContractError("stack_features: no samples");
  const std::size_t dim = samples.front().x.size();
  Tensor x(Shape{samples.size(), dim});
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].x.size() != dim) throw DimensionError("ragged samples");
    std::copy(samples[r].x.begin(), samples[r].x.end(), x.row(r).begin());
  }
  return x;
}

TrainingData DomainPair::training_view() const {
  TrainingData view;
  view.source_x = stack_features(source);
  view.source_y.reserve(source.size());
  for (const LabeledSample& s : source) view.source_y.push_back(s.y);
  view.target_x = stack_features(target);
  view.num_categories = mixture.num_categories;
  return view;
}

DomainPair make_domain_pair(const MixtureSpec& mixture,
                            const ShiftDescriptor& shift,
                            std::uint64_t root_seed) {
  DomainPair pair;
  pair.mixture = mixture;
  pair.shift = shift;
  pair.source =
      make_gaussian_mixture(mixture, derive_seed(root_seed, "data.source"));
  pair.target =
      shift_domain(mixture, shift, derive_seed(root_seed, "data.target"));
  return pair;
}

std::string_view variant_name(Variant variant) {
  switch (variant) {
    case Variant::kBaseline: return "baseline";
    case Variant::kSourceKeys: return "S";
    case Variant::kTargetKeys: return "T";
    case Variant::kFull: return "full";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "baseline") return Variant::kBaseline;
  if (name == "S") return Variant::kSourceKeys;
  if (name == "T") return Variant::kTargetKeys;
  if (name == "full") return Variant::kFull;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected baseline, S, T or full)");
}

namespace {

// First n entries of a partial Fisher-Yates shuffle of [0, population).
std::vector<std::size_t> draw_distinct(std::size_t population, std::size_t n,
                                       Rng& rng) {
  if (n > population) {
    throw ContractError("cannot draw " + std::to_string(n) +
                        " distinct rows from " + std::to_string(population));
  }
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(pool[i], pool[pick(rng.engine())]);
  }
  pool.resize(n);
  return pool;
}

void copy_rows(const Tensor& from, std::span<const std::size_t> rows,
               Tensor& to, std::size_t offset) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = from.row(rows[i]);
    std::copy(src.begin(), src.end(), to.row(offset + i).begin());
  }
}

}  // namespace

QueryBatch sample_query_batch(const TrainingData& data, std::size_t n,
                              Rng& rng) {
  if (n == 0) throw ContractError("query batch must be non-empty");
  QueryBatch batch;
  batch.indices = draw_distinct(data.target_size(), n, rng);
  batch.x = Tensor(Shape{n, data.target_x.cols()});
  copy_rows(data.target_x, batch.indices, batch.x, 0);
  return batch;
}

KeyBatch sample_key_batch(const TrainingData& data, std::size_t n,
                          Variant variant, Rng& rng) {
  if (n == 0) throw ContractError("key batch must be non-empty");
  std::size_t n_source = 0;
  switch (variant) {
    case Variant::kBaseline:
      throw ContractError("the baseline variant draws no keys");
    case Variant::kSourceKeys: n_source = n; break;
    case Variant::kTargetKeys: n_source = 0; break;
    case Variant::kFull:
      if (n % 2 != 0) {
        throw ContractError("full variant needs an even key batch, got " +
                            std::to_string(n));
      }
      n_source = n / 2;
      break;
  }
  const std::size_t n_target = n - n_source;
  const auto source_rows = draw_distinct(data.source_size(), n_source, rng);
  const auto target_rows = draw_distinct(data.target_size(), n_target, rng);

  KeyBatch batch;
  batch.x = Tensor(Shape{n, data.source_x.cols()});
  copy_rows(data.source_x, source_rows, batch.x, 0);
  copy_rows(data.target_x, target_rows, batch.x, n_source);
  for (std::size_t row : source_rows) {
    batch.domains.push_back(Domain::kSource);
    batch.ground_truth.emplace_back(data.source_y[row]);
  }
  for (std::size_t i = 0; i < n_target; ++i) {
    batch.domains.push_back(Domain::kTarget);
    batch.ground_truth.emplace_back(std::nullopt);
  }
  return batch;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const DomainPair& pair) {
  const std::size_t dim = pair.mixture.dim;
  for (std::size_t j = 0; j < dim; ++j) out << 'x' << (j + 1) << ',';
  out << "y,domain\n";
  const auto emit = [&](const std::vector<LabeledSample>& samples,
                        Domain domain) {
    for (const LabeledSample& s : samples) {
      for (double v : s.x) out << format_double(v) << ',';
      out << s.y.index() << ',' << domain_name(domain) << '\n';
    }
  };
  emit(pair.source, Domain::kSource);
  emit(pair.target, Domain::kTarget);
}

DomainPair read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset csv: empty input");
  std::size_t columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 4) throw ConfigError("dataset csv: too few columns");
  const std::size_t dim = columns - 2;

  struct Row {
    std::vector<double> x;
    std::size_t y;
    Domain domain;
  };
  std::vector<Row> rows;
  std::size_t max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != columns) {
      throw ConfigError("dataset csv: line " + std::to_string(line_no) +
                        " has " + std::to_string(fields.size()) + " fields");
    }
    Row row;
    row.x.resize(dim);
    try {
      for (std::size_t j = 0; j < dim; ++j) row.x[j] = std::stod(fields[j]);
      row.y = std::stoul(fields[dim]);
      row.domain = parse_domain(fields[dim + 1]);
    } catch (const std::exception&) {
      throw ConfigError("dataset csv: malformed line " +
                        std::to_string(line_no));
    }
    max_label = std::max(max_label, row.y);
    rows.push_back(std::move(row));
  }

  DomainPair pair;
  pair.mixture.dim = dim;
  pair.mixture.num_categories = std::max<std::size_t>(max_label + 1, 2);
  for (Row& row : rows) {
    LabeledSample sample{std::move(row.x),
                         CategoryLabel(row.y, pair.mixture.num_categories)};
    (row.domain == Domain::kSource ? pair.source : pair.target)
        .push_back(std::move(sample));
  }
  pair.mixture.n_per_class =
      pair.source.size() / pair.mixture.num_categories;
  return pair;
}

}  // namespace caco
