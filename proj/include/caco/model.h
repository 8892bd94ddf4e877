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

#ifndef CACO_MODEL_H_
#define CACO_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "caco/autodiff.h"
#include "caco/tensor.h"

namespace caco {

// Widths of an MLP: input dim, one or more hidden widths, embedding dim.
// Hidden layers use a rectifier; the last layer is linear and its output is
// L2-normalized per row.
struct MlpSpec {
  std::vector<std::size_t> layer_widths;

  void validate() const;
  std::size_t input_dim() const { return layer_widths.front(); }
  std::size_t embed_dim() const { return layer_widths.back(); }
  std::size_t num_layers() const { return layer_widths.size() - 1; }

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

// Parameters of one encoder. tensors holds weight (fan_in x fan_out) and
// bias (fan_out) for each layer, in that order.
struct ParamSet {
  MlpSpec spec;
  std::vector<Tensor> tensors;

  const Tensor& weight(std::size_t layer) const { return tensors[2 * layer]; }
  const Tensor& bias(std::size_t layer) const { return tensors[2 * layer + 1]; }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

// Weights ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero.
ParamSet init_params(const MlpSpec& spec, std::uint64_t seed);

// Plain forward pass: rows of x are inputs, rows of the result unit-norm.
Tensor encode(const ParamSet& params, const Tensor& x);

// Taped forward pass; params must be ordered like ParamSet::tensors.
Var encode(std::span<const Var> params, Var x);

// Linear map from embeddings to category logits, followed by softmax.
struct Classifier {
  Tensor weight;  // d x C
  Tensor bias;    // C

  std::size_t embed_dim() const { return weight.rows(); }
  std::size_t num_categories() const { return weight.cols(); }

  friend bool operator==(const Classifier&, const Classifier&) = default;
};

Classifier init_classifier(std::size_t embed_dim, std::size_t num_categories,
                           std::uint64_t seed);

// Row-wise probabilities on the simplex.
Tensor classify(const Classifier& h, const Tensor& embeddings);
Var classifier_logits(Var weight, Var bias, Var embeddings);

// Query encoder f_q and momentum key encoder f_k.
struct EncoderPair {
  ParamSet query;
  ParamSet key;
  double momentum = 0.999;

  // f_k starts as an exact copy of f_q.
  static EncoderPair from_query(ParamSet query, double momentum);
};

// key <- b * key + (1 - b) * query, coordinate-wise.
void momentum_update(EncoderPair& pair);

struct Model {
  EncoderPair encoders;
  Classifier classifier;
  std::uint64_t seed = 0;

  // argmax of classify(encode_q(x)) per row.
  std::vector<std::size_t> predict(const Tensor& x) const;
};

}  // namespace caco

#endif  // CACO_MODEL_H_
