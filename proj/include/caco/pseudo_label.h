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

#ifndef CACO_PSEUDO_LABEL_H_
#define CACO_PSEUDO_LABEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "caco/tensor.h"

namespace caco {

enum class Domain { kSource, kTarget };

std::string_view domain_name(Domain domain);
Domain parse_domain(std::string_view name);

// A vertex of the probability simplex: category `index` out of
// `num_categories`, 0-based.
class CategoryLabel {
 public:
  CategoryLabel(std::size_t index, std::size_t num_categories);

  std::size_t index() const { return index_; }
  std::size_t num_categories() const { return num_categories_; }
  Tensor one_hot() const;

  friend bool operator==(const CategoryLabel&, const CategoryLabel&) = default;

 private:
  std::size_t index_;
  std::size_t num_categories_;
};

// Tolerance on |sum - 1| and on negative entries when checking simplex
// membership.
inline constexpr double kSimplexTolerance = 1e-9;

// Throws ContractError if probs is not on the simplex.
void require_simplex(std::span<const double> probs, const char* who);

// Maximizes sum_c y_c log p_c over the simplex: the vertex at argmax p.
// Ties go to the lowest index.
CategoryLabel assign_pseudo_label(std::span<const double> probs);

// Source keys keep their ground truth; target keys get pseudo-labels.
CategoryLabel key_label(Domain domain,
                        const std::optional<CategoryLabel>& ground_truth,
                        std::span<const double> probs);

}  // namespace caco

#endif  // CACO_PSEUDO_LABEL_H_
