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

#ifndef CACO_AUTODIFF_H_
#define CACO_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "caco/tensor.h"

namespace caco {

class Tape;

// Handle to a tensor recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool requires_grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Gradient of a scalar with respect to the grad-enabled leaves of a tape,
// keyed by leaf id.
class Gradients {
 public:
  bool contains(Var v) const { return grads_.count(v.id()) != 0; }
  const Tensor& operator[](Var v) const;
  const std::map<std::size_t, Tensor>& by_id() const { return grads_; }

 private:
  friend class Tape;
  std::map<std::size_t, Tensor> grads_;
};

// Records primitive operations in execution order; backward() replays them
// in reverse, visiting each node once. Gradients flowing into a node from
// several consumers are summed in tape order.
class Tape {
 public:
  // Receives the upstream gradient and, per parent, whether a gradient is
  // wanted; returns one tensor per parent (empty when not wanted).
  using BackwardFn = std::function<std::vector<Tensor>(
      const Tensor& grad_out, std::span<const bool> wanted)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // A leaf takes its grad flag from value.requires_grad().
  Var leaf(Tensor value);
  Var constant(Tensor value);
  Var record(Tensor value, std::vector<Var> parents, BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const {
    return nodes_.at(id).requires_grad;
  }
  std::size_t size() const { return nodes_.size(); }

  Gradients backward(Var loss) const;

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_leaf = false;
  };
  std::vector<Node> nodes_;
};

// Differentiable primitives. Every result lives on the operands' tape.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
// x[r][j] + bias[j]
Var add_row_bias(Var x, Var bias);
Var relu(Var x);
// Row-wise for matrices, whole-vector for rank 1.
Var l2_normalize(Var x);
Var log_softmax(Var x, double tau);
// x[r][j] / divisors[j]; divisors are constants.
Var divide_columns(Var x, const Tensor& divisors);
Var reshape(Var x, Shape shape);
// out[r] = log sum_{j : mask[r][j] != 0} exp(x[r][j]). Each row needs at
// least one selected entry.
Var masked_log_sum_exp(Var x, const Tensor& mask);
Var sum(Var x);
Var mean(Var x);

// Backward entry point matching the free-function style of the ops.
inline Gradients backward(Var loss) { return loss.tape()->backward(loss); }

// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double eps);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
double max_relative_error(const Tensor& analytic, const Tensor& numeric,
                          double floor = 1e-5);

}  // namespace caco

#endif  // CACO_AUTODIFF_H_
