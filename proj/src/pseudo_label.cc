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

#include "caco/pseudo_label.h"

#include <cmath>
#include <string>

#include "caco/errors.h"

namespace caco {

std::string_view domain_name(Domain domain) {
  return domain == Domain::kSource ? "source" : "target";
}

Domain parse_domain(std::string_view name) {
  if (name == "source") return Domain::kSource;
  if (name == "target") return Domain::kTarget;
  throw ContractError("unknown domain '" + std::string(name) + "'");
}

CategoryLabel::CategoryLabel(std::size_t index, std::size_t num_categories)
    : index_(index), num_categories_(num_categories) {
  if (index >= num_categories) {
    throw ContractError("category " + std::to_string(index) +
                        " out of range for C=" +
                        std::to_string(num_categories));
  }
}

Tensor CategoryLabel::one_hot() const {
  Tensor t(Shape{num_categories_});
  t[index_] = 1.0;
  return t;
}

void require_simplex(std::span<const double> probs, const char* who) {
  if (probs.empty()) throw ContractError(std::string(who) + ": empty input");
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < -kSimplexTolerance) {
      throw ContractError(std::string(who) + ": entry off the simplex");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw ContractError(std::string(who) + ": entries sum to " +
                        std::to_string(total));
  }
}

CategoryLabel assign_pseudo_label(std::span<const double> probs) {
  require_simplex(probs, "assign_pseudo_label");
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return CategoryLabel(best, probs.size());
}

CategoryLabel key_label(Domain domain,
                        const std::optional<CategoryLabel>& ground_truth,
                        std::span<const double> probs) {
  if (domain == Domain::kSource) {
    if (!ground_truth) {
      throw ContractError("key_label: source sample without ground truth");
    }
    return *ground_truth;
  }
  return assign_pseudo_label(probs);
}

}  // namespace caco
