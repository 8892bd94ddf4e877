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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "caco/errors.h"

namespace caco {

std::size_t shape_volume(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.size() > 2) {
    throw DimensionError("tensor rank above 2 is not supported: " +
                         shape_string(shape));
  }
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw DimensionError("tensor extents must be positive: " +
                           shape_string(shape));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_volume(shape_), fill) {
  check_shape(shape_);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  check_shape(shape_);
  if (shape_volume(shape_) != values_.size()) {
    throw DimensionError("shape " + shape_string(shape_) + " does not hold " +
                         std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::vector(std::initializer_list<double> values) {
  return vector(std::vector<double>(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

Tensor Tensor::matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return matrix(r, c, std::move(values));
}

std::size_t Tensor::rows() const {
  return rank() == 2 ? shape_[0] : 1;
}

std::size_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  return 1;
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw DimensionError("item() on tensor of shape " + shape_string(shape_));
  }
  return values_[0];
}

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(values_).subspan(r * cols(), cols());
}

std::span<double> Tensor::row(std::size_t r) {
  return std::span<double>(values_).subspan(r * cols(), cols());
}

Tensor Tensor::reshaped(Shape shape) const {
  Tensor out(std::move(shape), values_);
  return out;
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* out = c.row(i).data();
    for (std::size_t t = 0; t < k; ++t) {
      const double scale = a.at(i, t);
      const double* brow = b.row(t).data();
      for (std::size_t j = 0; j < n; ++j) out[j] += scale * brow[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw DimensionError("transpose needs a matrix");
  Tensor t(Shape{a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
  return t;
}

Tensor log_softmax(const Tensor& v, double tau) {
  if (!(tau > 0.0)) throw ParameterError("log_softmax: tau must be > 0");
  if (v.rank() == 0) throw DimensionError("log_softmax needs rank >= 1");
  Tensor out(v.shape());
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto in = v.row(r);
    auto dst = out.row(r);
    std::size_t top = 0;
    for (std::size_t j = 1; j < in.size(); ++j) {
      if (in[j] > in[top]) top = j;
    }
    const double peak = in[top] / tau;
    // log1p keeps full precision when one entry dominates the row.
    double rest = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      if (j != top) rest += std::exp(in[j] / tau - peak);
    }
    const double log_norm = std::log1p(rest);
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = (in[j] / tau - peak) - log_norm;
    }
  }
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = log_softmax(logits, 1.0);
  for (double& x : out.values()) x = std::exp(x);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Tensor l2_normalize(const Tensor& v) {
  if (v.rank() == 0) throw DimensionError("l2_normalize needs rank >= 1");
  Tensor out(v.shape());
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double norm = l2_norm(v.row(r));
    if (!(norm > kMinNormalizableNorm)) {
      throw DegenerateEmbeddingError("l2_normalize: near-zero norm");
    }
    auto src = v.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] / norm;
  }
  return out;
}

}  // namespace caco
