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

#include "caco/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "caco/autodiff.h"
#include "caco/dictionary.h"
#include "caco/losses.h"
#include "caco/model.h"
#include "caco/rng.h"

namespace caco {

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng.engine());
}

Tensor random_tensor(Shape shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  const double n = l2_norm(v);
  for (double& x : v) x /= n;
  return v;
}

double check_supervised(Rng& rng) {
  const std::size_t batch = pick(rng, 1, 6), classes = pick(rng, 2, 6);
  std::vector<CategoryLabel> labels;
  for (std::size_t i = 0; i < batch; ++i) {
    labels.emplace_back(pick(rng, 0, classes - 1), classes);
  }
  const Tensor logits = random_tensor(Shape{batch, classes}, rng, -3.0, 3.0);
  const auto f = [&](const Tensor& x) {
    Tape tape;
    return supervised_loss(tape.constant(x), labels).item();
  };
  Tape tape;
  Tensor leaf = logits;
  Var v = tape.leaf(std::move(leaf.set_requires_grad()));
  const Tensor analytic = backward(supervised_loss(v, labels).value)[v];
  return max_relative_error(analytic,
                            finite_diff_grad(f, logits, kGradcheckEps));
}

double check_info_nce(Rng& rng) {
  const std::size_t dim = pick(rng, 2, 8), n_keys = pick(rng, 2, 10);
  Tensor keys(Shape{n_keys, dim});
  for (std::size_t r = 0; r < n_keys; ++r) {
    const auto k = random_unit(dim, rng);
    std::copy(k.begin(), k.end(), keys.row(r).begin());
  }
  std::vector<int> mask(n_keys, 0);
  mask[pick(rng, 0, n_keys - 1)] = 1;
  for (int& m : mask) {
    if (rng.uniform(0.0, 1.0) < 0.2) m = 1;
  }
  const double tau = rng.uniform(0.07, 0.5);
  const Tensor query = Tensor::vector(random_unit(dim, rng));
  const auto f = [&](const Tensor& x) {
    Tape tape;
    return info_nce(tape.constant(x), keys, mask, tau).item();
  };
  Tape tape;
  Tensor leaf = query;
  Var q = tape.leaf(std::move(leaf.set_requires_grad()));
  const Tensor analytic = backward(info_nce(q, keys, mask, tau).value)[q];
  return max_relative_error(analytic, finite_diff_grad(f, query, kGradcheckEps));
}

double check_cat_nce(Rng& rng) {
  const std::size_t classes = pick(rng, 2, 5), groups = pick(rng, 1, 4);
  const std::size_t dim = pick(rng, 2, 8), batch = pick(rng, 1, 4);
  CategoricalDictionary dict(classes, groups);
  for (std::size_t m = 0; m < groups; ++m) {
    for (std::size_t c = 0; c < classes; ++c) {
      const double entropy =
          rng.uniform(0.0, std::log(static_cast<double>(classes)));
      dict.enqueue({random_unit(dim, rng), c,
                    key_temperature(0.07, entropy, classes),
                    rng.uniform(0.0, 1.0) < 0.5 ? Domain::kSource
                                                : Domain::kTarget,
                    0});
    }
  }
  std::vector<CategoryLabel> labels;
  Tensor queries(Shape{batch, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    labels.emplace_back(pick(rng, 0, classes - 1), classes);
    const auto q = random_unit(dim, rng);
    std::copy(q.begin(), q.end(), queries.row(b).begin());
  }
  const auto f = [&](const Tensor& x) {
    Tape tape;
    return cat_nce(tape.constant(x), labels, dict).item();
  };
  Tape tape;
  Tensor leaf = queries;
  Var q = tape.leaf(std::move(leaf.set_requires_grad()));
  const Tensor analytic = backward(cat_nce(q, labels, dict).value)[q];
  return max_relative_error(analytic,
                            finite_diff_grad(f, queries, kGradcheckEps));
}

double check_encoder_stack(Rng& rng) {
  const std::size_t input = pick(rng, 2, 5), classes = pick(rng, 2, 4);
  const MlpSpec spec{{input, pick(rng, 3, 6), pick(rng, 3, 6), pick(rng, 2, 4)}};
  ParamSet params = init_params(spec, rng.engine()());
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    for (double& v : params.tensors[2 * l + 1].values()) v = rng.uniform(-0.5, 0.5);
  }
  Classifier head = init_classifier(spec.embed_dim(), classes, rng.engine()());
  const std::size_t batch = pick(rng, 1, 4);
  const Tensor x = random_tensor(Shape{batch, input}, rng, -2.0, 2.0);
  std::vector<CategoryLabel> labels;
  for (std::size_t b = 0; b < batch; ++b) {
    labels.emplace_back(pick(rng, 0, classes - 1), classes);
  }

  // Flattened view: every encoder tensor followed by classifier weight, bias.
  std::vector<Tensor> all = params.tensors;
  all.push_back(head.weight);
  all.push_back(head.bias);
  const auto loss_on = [&](Tape& tape, const std::vector<Tensor>& tensors,
                           bool grad, std::vector<Var>* vars) {
    std::vector<Var> local;
    for (const Tensor& t : tensors) {
      Tensor copy = t;
      local.push_back(tape.leaf(std::move(copy.set_requires_grad(grad))));
    }
    const std::span<const Var> enc(local.data(), local.size() - 2);
    Var logits = classifier_logits(local[local.size() - 2], local.back(),
                                   encode(enc, tape.constant(x)));
    if (vars) *vars = local;
    return supervised_loss(logits, labels).value;
  };

  Tape tape;
  std::vector<Var> vars;
  const Gradients grads = backward(loss_on(tape, all, true, &vars));
  double worst = 0.0;
  for (std::size_t t = 0; t < all.size(); ++t) {
    const auto f = [&](const Tensor& probe) {
      std::vector<Tensor> perturbed = all;
      perturbed[t] = probe;
      Tape local;
      return loss_on(local, perturbed, false, nullptr).value().item();
    };
    worst = std::max(worst, max_relative_error(
                                grads[vars[t]],
                                finite_diff_grad(f, all[t], kGradcheckEps)));
  }
  return worst;
}

}  // namespace

std::vector<GradcheckSuiteResult> run_gradcheck(std::uint64_t seed,
                                                std::size_t instances) {
  struct Suite {
    const char* name;
    double (*check)(Rng&);
  };
  const Suite suites[] = {{"supervised_loss", check_supervised},
                          {"info_nce", check_info_nce},
                          {"cat_nce", check_cat_nce},
                          {"encoder+classifier", check_encoder_stack}};
  std::vector<GradcheckSuiteResult> results;
  for (const Suite& suite : suites) {
    Rng rng = Rng::stream(seed, std::string("gradcheck.") + suite.name);
    GradcheckSuiteResult r{suite.name, instances, 0.0};
    for (std::size_t i = 0; i < instances; ++i) {
      r.max_relative_error = std::max(r.max_relative_error, suite.check(rng));
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace caco
