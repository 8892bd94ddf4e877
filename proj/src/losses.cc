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

#include "caco/losses.h"

#include <cmath>
#include <string>

#include "caco/errors.h"

namespace caco {

LossValue supervised_loss(Var logits, std::span<const CategoryLabel> labels) {
  const Tensor& lv = logits.value();
  if (lv.rank() != 2 || lv.rows() != labels.size()) {
    throw DimensionError("supervised_loss: logits " + shape_string(lv.shape()) +
                         " for " + std::to_string(labels.size()) + " labels");
  }
  Tensor mask(lv.shape());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r].num_categories() != lv.cols()) {
      throw DimensionError("supervised_loss: label arity != logit width");
    }
    mask.at(r, labels[r].index()) = 1.0;
  }
  Var picked = masked_log_sum_exp(log_softmax(logits, 1.0), mask);
  return {scale(mean(picked), -1.0), labels.size()};
}

LossValue info_nce(Var query, const Tensor& keys,
                   std::span<const int> positive_mask, double tau) {
  if (!(tau > 0.0)) throw ParameterError("info_nce: tau must be > 0");
  const std::size_t dim = query.value().size();
  if (keys.rank() != 2 || keys.cols() != dim ||
      positive_mask.size() != keys.rows()) {
    throw DimensionError("info_nce: query dim " + std::to_string(dim) +
                         ", keys " + shape_string(keys.shape()) + ", mask " +
                         std::to_string(positive_mask.size()));
  }
  Tensor mask(Shape{1, keys.rows()});
  bool any = false;
  for (std::size_t i = 0; i < positive_mask.size(); ++i) {
    if (positive_mask[i] != 0) {
      mask[i] = 1.0;
      any = true;
    }
  }
  if (!any) throw ContractError("info_nce: no positive key");

  Tape* tape = query.tape();
  Var q_row = reshape(query, Shape{1, dim});
  Var logits = matmul(q_row, tape->constant(transpose(keys)));
  Var log_probs = log_softmax(logits, tau);
  return {scale(sum(masked_log_sum_exp(log_probs, mask)), -1.0), 1};
}

double prediction_entropy(std::span<const double> probs) {
  require_simplex(probs, "prediction_entropy");
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double key_temperature(double tau_base, double entropy,
                       std::size_t num_categories) {
  if (!(tau_base > 0.0)) throw ParameterError("key_temperature: tau_base <= 0");
  if (num_categories < 2) throw ParameterError("key_temperature: C < 2");
  const double max_entropy = std::log(static_cast<double>(num_categories));
  if (!(entropy >= 0.0) || entropy > max_entropy + 1e-9) {
    throw ContractError("key_temperature: entropy outside [0, log C]");
  }
  return tau_base * (1.0 + entropy / max_entropy);
}

LossValue cat_nce(Var queries, std::span<const CategoryLabel> query_labels,
                  const CategoricalDictionary& dict) {
  if (!dict.is_warm()) {
    throw NotWarmError("cat_nce: dictionary queues are not full");
  }
  const Tensor& qv = queries.value();
  const std::size_t batch = qv.rows();
  const std::size_t dim = dict.embed_dim();
  const std::size_t categories = dict.num_categories();
  const std::size_t groups = dict.capacity();
  if (qv.rank() != 2 || qv.cols() != dim || query_labels.size() != batch) {
    throw DimensionError("cat_nce: queries " + shape_string(qv.shape()) +
                         " vs key dim " + std::to_string(dim) + " and " +
                         std::to_string(query_labels.size()) + " labels");
  }

  // Column m * C + c holds key k^c_m.
  const std::size_t columns = groups * categories;
  Tensor keys_t(Shape{dim, columns});
  Tensor temperatures(Shape{columns});
  for (std::size_t c = 0; c < categories; ++c) {
    const auto& queue = dict.queue(c);
    for (std::size_t m = 0; m < groups; ++m) {
      const CategoricalKey& key = queue[queue.size() - 1 - m];
      const std::size_t col = m * categories + c;
      for (std::size_t j = 0; j < dim; ++j) keys_t.at(j, col) = key.vector[j];
      temperatures[col] = key.temperature;
    }
  }

  Tensor mask(Shape{batch * groups, categories});
  for (std::size_t b = 0; b < batch; ++b) {
    if (query_labels[b].num_categories() != categories) {
      throw DimensionError("cat_nce: label arity != dictionary categories");
    }
    for (std::size_t m = 0; m < groups; ++m) {
      mask.at(b * groups + m, query_labels[b].index()) = 1.0;
    }
  }

  Tape* tape = queries.tape();
  Var logits = divide_columns(matmul(queries, tape->constant(keys_t)),
                              temperatures);
  Var per_group = reshape(logits, Shape{batch * groups, categories});
  Var positive = masked_log_sum_exp(log_softmax(per_group, 1.0), mask);
  return {scale(mean(positive), -1.0), batch};
}

}  // namespace caco
