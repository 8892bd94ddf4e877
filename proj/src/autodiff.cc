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

#include "caco/autodiff.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "caco/errors.h"

namespace caco {

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("Var is not attached to a tape");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

const Tensor& Gradients::operator[](Var v) const {
  auto it = grads_.find(v.id());
  if (it == grads_.end()) {
    throw ContractError("no gradient recorded for tape node " +
                        std::to_string(v.id()));
  }
  return it->second;
}

Var Tape::leaf(Tensor value) {
  Node node;
  node.requires_grad = value.requires_grad();
  node.value = std::move(value);
  node.is_leaf = true;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  value.set_requires_grad(false);
  return leaf(std::move(value));
}

Var Tape::record(Tensor value, std::vector<Var> parents, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.backward = std::move(backward);
  for (const Var& p : parents) {
    if (p.tape() != this) throw ContractError("operands live on another tape");
    node.parents.push_back(p.id());
    node.requires_grad = node.requires_grad || nodes_[p.id()].requires_grad;
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

namespace {

void accumulate(Tensor& into, Tensor&& grad) {
  if (into.empty()) {
    into = std::move(grad);
    return;
  }
  auto dst = into.values();
  auto src = grad.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Gradients Tape::backward(Var loss) const {
  if (loss.tape() != this) throw ContractError("loss lives on another tape");
  if (value(loss.id()).size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " +
                        shape_string(value(loss.id()).shape()));
  }
  Gradients result;
  if (!nodes_[loss.id()].requires_grad) return result;

  std::vector<Tensor> grads(loss.id() + 1);
  grads[loss.id()] = Tensor(value(loss.id()).shape(), 1.0);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (grads[i].empty() || !node.requires_grad) continue;
    if (node.is_leaf) {
      result.grads_.emplace(i, std::move(grads[i]));
      continue;
    }
    const std::size_t n_parents = node.parents.size();
    auto flags = std::make_unique<bool[]>(n_parents);
    for (std::size_t p = 0; p < n_parents; ++p) {
      flags[p] = nodes_[node.parents[p]].requires_grad;
    }
    std::vector<Tensor> parent_grads = node.backward(
        grads[i], std::span<const bool>(flags.get(), n_parents));
    for (std::size_t p = 0; p < n_parents; ++p) {
      if (!flags[p] || parent_grads[p].empty()) continue;
      accumulate(grads[node.parents[p]], std::move(parent_grads[p]));
    }
    grads[i] = Tensor();
  }
  return result;
}

namespace {

Tape* common_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw ContractError("operands on different tapes");
  return a.tape();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape* tape = common_tape(a, b);
  Tensor out = matmul(a.value(), b.value());
  return tape->record(
      std::move(out), {a, b},
      [a, b](const Tensor& g, std::span<const bool> wanted) {
        std::vector<Tensor> grads(2);
        if (wanted[0]) grads[0] = matmul(g, transpose(b.value()));
        if (wanted[1]) grads[1] = matmul(transpose(a.value()), g);
        return grads;
      });
}

Var add(Var a, Var b) {
  Tape* tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return tape->record(std::move(out), {a, b},
                      [](const Tensor& g, std::span<const bool>) {
                        return std::vector<Tensor>{g, g};
                      });
}

Var sub(Var a, Var b) {
  Tape* tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return tape->record(std::move(out), {a, b},
                      [](const Tensor& g, std::span<const bool>) {
                        Tensor neg = g;
                        for (double& x : neg.values()) x = -x;
                        return std::vector<Tensor>{g, std::move(neg)};
                      });
}

Var mul(Var a, Var b) {
  Tape* tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return tape->record(
      std::move(out), {a, b},
      [a, b](const Tensor& g, std::span<const bool> wanted) {
        std::vector<Tensor> grads(2);
        if (wanted[0]) {
          grads[0] = g;
          for (std::size_t i = 0; i < g.size(); ++i)
            grads[0][i] *= b.value()[i];
        }
        if (wanted[1]) {
          grads[1] = g;
          for (std::size_t i = 0; i < g.size(); ++i)
            grads[1][i] *= a.value()[i];
        }
        return grads;
      });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& x : out.values()) x *= factor;
  return a.tape()->record(std::move(out), {a},
                          [factor](const Tensor& g, std::span<const bool>) {
                            Tensor d = g;
                            for (double& x : d.values()) x *= factor;
                            return std::vector<Tensor>{std::move(d)};
                          });
}

Var add_row_bias(Var x, Var bias) {
  Tape* tape = common_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (xv.rank() != 2 || bv.rank() != 1 || bv.size() != xv.cols()) {
    throw DimensionError("add_row_bias: " + shape_string(xv.shape()) + " + " +
                         shape_string(bv.shape()));
  }
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bv[j];
  }
  return tape->record(
      std::move(out), {x, bias},
      [](const Tensor& g, std::span<const bool> wanted) {
        std::vector<Tensor> grads(2);
        if (wanted[0]) grads[0] = g;
        if (wanted[1]) {
          Tensor db(Shape{g.cols()});
          for (std::size_t r = 0; r < g.rows(); ++r) {
            auto row = g.row(r);
            for (std::size_t j = 0; j < row.size(); ++j) db[j] += row[j];
          }
          grads[1] = std::move(db);
        }
        return grads;
      });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return x.tape()->record(std::move(out), {x},
                          [x](const Tensor& g, std::span<const bool>) {
                            Tensor d = g;
                            const Tensor& in = x.value();
                            for (std::size_t i = 0; i < d.size(); ++i) {
                              if (!(in[i] > 0.0)) d[i] = 0.0;
                            }
                            return std::vector<Tensor>{std::move(d)};
                          });
}

Var l2_normalize(Var x) {
  Tensor out = l2_normalize(x.value());
  std::vector<double> norms(x.value().rows());
  for (std::size_t r = 0; r < norms.size(); ++r) {
    norms[r] = l2_norm(x.value().row(r));
  }
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->record(
      std::move(out), {x},
      [tape, out_id, norms = std::move(norms)](const Tensor& g,
                                               std::span<const bool>) {
        const Tensor& y = tape->value(out_id);
        Tensor d(g.shape());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto yr = y.row(r);
          auto gr = g.row(r);
          auto dr = d.row(r);
          const double proj = dot(yr, gr);
          for (std::size_t j = 0; j < dr.size(); ++j) {
            dr[j] = (gr[j] - yr[j] * proj) / norms[r];
          }
        }
        return std::vector<Tensor>{std::move(d)};
      });
}

Var log_softmax(Var x, double tau) {
  Tensor out = log_softmax(x.value(), tau);
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->record(
      std::move(out), {x},
      [tape, out_id, tau](const Tensor& g, std::span<const bool>) {
        const Tensor& y = tape->value(out_id);
        Tensor d(g.shape());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto yr = y.row(r);
          auto gr = g.row(r);
          auto dr = d.row(r);
          double gsum = 0.0;
          for (double v : gr) gsum += v;
          for (std::size_t j = 0; j < dr.size(); ++j) {
            dr[j] = (gr[j] - std::exp(yr[j]) * gsum) / tau;
          }
        }
        return std::vector<Tensor>{std::move(d)};
      });
}

Var divide_columns(Var x, const Tensor& divisors) {
  const Tensor& xv = x.value();
  if (divisors.size() != xv.cols()) {
    throw DimensionError("divide_columns: " + shape_string(xv.shape()) +
                         " by " + shape_string(divisors.shape()));
  }
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] /= divisors[j];
  }
  return x.tape()->record(std::move(out), {x},
                          [divisors](const Tensor& g, std::span<const bool>) {
                            Tensor d = g;
                            for (std::size_t r = 0; r < d.rows(); ++r) {
                              auto row = d.row(r);
                              for (std::size_t j = 0; j < row.size(); ++j)
                                row[j] /= divisors[j];
                            }
                            return std::vector<Tensor>{std::move(d)};
                          });
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  const Shape original = x.value().shape();
  return x.tape()->record(std::move(out), {x},
                          [original](const Tensor& g, std::span<const bool>) {
                            return std::vector<Tensor>{g.reshaped(original)};
                          });
}

Var masked_log_sum_exp(Var x, const Tensor& mask) {
  const Tensor& xv = x.value();
  require_same_shape(xv, mask, "masked_log_sum_exp");
  const std::size_t rows = xv.rows();
  Tensor out(Shape{rows});
  for (std::size_t r = 0; r < rows; ++r) {
    auto xr = xv.row(r);
    auto mr = mask.row(r);
    std::size_t top = xr.size();
    for (std::size_t j = 0; j < xr.size(); ++j) {
      if (mr[j] != 0.0 && (top == xr.size() || xr[j] > xr[top])) top = j;
    }
    if (top == xr.size()) {
      throw ContractError("masked_log_sum_exp: row selects nothing");
    }
    double rest = 0.0;
    for (std::size_t j = 0; j < xr.size(); ++j) {
      if (mr[j] != 0.0 && j != top) rest += std::exp(xr[j] - xr[top]);
    }
    out[r] = xr[top] + std::log1p(rest);
  }
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->record(
      std::move(out), {x},
      [x, mask, tape, out_id](const Tensor& g, std::span<const bool>) {
        const Tensor& xv = x.value();
        const Tensor& lse = tape->value(out_id);
        Tensor d(xv.shape());
        for (std::size_t r = 0; r < xv.rows(); ++r) {
          auto xr = xv.row(r);
          auto mr = mask.row(r);
          auto dr = d.row(r);
          for (std::size_t j = 0; j < xr.size(); ++j) {
            if (mr[j] != 0.0) dr[j] = g[r] * std::exp(xr[j] - lse[r]);
          }
        }
        return std::vector<Tensor>{std::move(d)};
      });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  const Shape shape = x.value().shape();
  return x.tape()->record(Tensor::scalar(total), {x},
                          [shape](const Tensor& g, std::span<const bool>) {
                            return std::vector<Tensor>{Tensor(shape, g.item())};
                          });
}

Var mean(Var x) {
  const double n = static_cast<double>(x.value().size());
  return scale(sum(x), 1.0 / n);
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double eps) {
  if (!(eps > 0.0)) throw ParameterError("finite_diff_grad: eps must be > 0");
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = f(probe);
    probe[i] = saved - eps;
    const double down = f(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double max_relative_error(const Tensor& analytic, const Tensor& numeric,
                          double floor) {
  if (analytic.size() != numeric.size()) {
    throw DimensionError("max_relative_error: size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double denom = std::max({std::abs(a), std::abs(n), floor});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

}  // namespace caco
