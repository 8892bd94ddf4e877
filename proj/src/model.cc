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

#include <algorithm>
#include <cmath>
#include <string>

#include "caco/errors.h"
#include "caco/rng.h"

namespace caco {

void MlpSpec::validate() const {
  if (layer_widths.size() < 3) {
    throw ParameterError("MlpSpec needs input, >= 1 hidden and output widths");
  }
  for (std::size_t w : layer_widths) {
    if (w == 0) throw ParameterError("MlpSpec widths must be positive");
  }
  if (embed_dim() < 2) throw ParameterError("embedding dim must be >= 2");
}

namespace {

Tensor uniform_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor w(Shape{fan_in, fan_out});
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  return w;
}

}  // namespace

ParamSet init_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParamSet params{spec, {}};
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const std::size_t fan_in = spec.layer_widths[l];
    const std::size_t fan_out = spec.layer_widths[l + 1];
    params.tensors.push_back(uniform_weight(fan_in, fan_out, rng));
    params.tensors.push_back(Tensor(Shape{fan_out}));
  }
  return params;
}

Var encode(std::span<const Var> params, Var x) {
  if (params.size() % 2 != 0 || params.empty()) {
    throw ContractError("encode: expected weight/bias pairs");
  }
  const std::size_t layers = params.size() / 2;
  if (x.value().rank() != 2 || x.value().cols() != params[0].value().rows()) {
    throw DimensionError("encode: input " + shape_string(x.shape()) +
                         " does not match first layer " +
                         shape_string(params[0].shape()));
  }
  Var h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    h = add_row_bias(matmul(h, params[2 * l]), params[2 * l + 1]);
    if (l + 1 < layers) h = relu(h);
  }
  return l2_normalize(h);
}

Tensor encode(const ParamSet& params, const Tensor& x) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.tensors.size());
  for (const Tensor& t : params.tensors) vars.push_back(tape.constant(t));
  return encode(vars, tape.constant(x)).value();
}

Classifier init_classifier(std::size_t embed_dim, std::size_t num_categories,
                           std::uint64_t seed) {
  if (num_categories == 0) throw ParameterError("classifier needs C >= 1");
  Rng rng(seed);
  return Classifier{uniform_weight(embed_dim, num_categories, rng),
                    Tensor(Shape{num_categories})};
}

Var classifier_logits(Var weight, Var bias, Var embeddings) {
  return add_row_bias(matmul(embeddings, weight), bias);
}

Tensor classify(const Classifier& h, const Tensor& embeddings) {
  if (embeddings.rank() != 2 || embeddings.cols() != h.embed_dim()) {
    throw DimensionError("classify: embeddings " +
                         shape_string(embeddings.shape()) + " vs weight " +
                         shape_string(h.weight.shape()));
  }
  Tensor logits = matmul(embeddings, h.weight);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += h.bias[c];
  }
  return softmax_rows(logits);
}

EncoderPair EncoderPair::from_query(ParamSet query, double momentum) {
  EncoderPair pair{query, query, momentum};
  return pair;
}

void momentum_update(EncoderPair& pair) {
  const double b = pair.momentum;
  if (!(b >= 0.0 && b <= 1.0)) {
    throw ParameterError("momentum coefficient must lie in [0, 1], got " +
                         std::to_string(b));
  }
  if (pair.key.tensors.size() != pair.query.tensors.size()) {
    throw DimensionError("momentum_update: encoders differ in layout");
  }
  for (std::size_t t = 0; t < pair.key.tensors.size(); ++t) {
    auto key = pair.key.tensors[t].values();
    auto query = pair.query.tensors[t].values();
    if (key.size() != query.size()) {
      throw DimensionError("momentum_update: tensor shapes differ");
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
      key[i] = b * key[i] + (1.0 - b) * query[i];
    }
  }
}

std::vector<std::size_t> Model::predict(const Tensor& x) const {
  const Tensor probs = classify(classifier, encode(encoders.query, x));
  std::vector<std::size_t> labels(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto row = probs.row(r);
    labels[r] = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return labels;
}

}  // namespace caco
