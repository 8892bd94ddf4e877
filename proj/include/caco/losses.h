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

#ifndef CACO_LOSSES_H_
#define CACO_LOSSES_H_

#include <cstddef>
#include <span>

#include "caco/autodiff.h"
#include "caco/dictionary.h"
#include "caco/pseudo_label.h"

namespace caco {

struct LossValue {
  Var value;               // scalar on the caller's tape
  std::size_t batch_size;  // number of contributing queries / samples
  double item() const { return value.value().item(); }
};

// Mean over rows of -log softmax(logits)[label].
LossValue supervised_loss(Var logits, std::span<const CategoryLabel> labels);

// -log( sum_i mask_i exp(q.k_i / tau) / sum_i exp(q.k_i / tau) ) for one
// query against the rows of `keys`. mask must flag at least one key.
LossValue info_nce(Var query, const Tensor& keys,
                   std::span<const int> positive_mask, double tau);

// Shannon entropy in nats, 0 log 0 = 0.
double prediction_entropy(std::span<const double> probs);

// tau_base * (1 + H / log C): tau_base for a certain key, 2 * tau_base for a
// uniform prediction.
double key_temperature(double tau_base, double entropy,
                       std::size_t num_categories);

// Category contrast against a warm dictionary. For every query and every
// group m of keys {k^1_m .. k^C_m}, a C-way softmax over q.k^c_m / tau^c_m is
// scored on the key sharing the query's label; the result is the mean over
// queries of the mean over groups of the negative log-probability.
// Keys and labels are constants, so gradients reach the queries only.
// Queries are expected to be unit-norm; this is not checked.
LossValue cat_nce(Var queries, std::span<const CategoryLabel> query_labels,
                  const CategoricalDictionary& dict);

}  // namespace caco

#endif  // CACO_LOSSES_H_
