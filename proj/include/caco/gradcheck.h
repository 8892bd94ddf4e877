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

#ifndef CACO_GRADCHECK_H_
#define CACO_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace caco {

inline constexpr double kGradcheckEps = 1e-5;
inline constexpr double kGradcheckTolerance = 1e-4;

struct GradcheckSuiteResult {
  std::string name;
  std::size_t instances = 0;
  double max_relative_error = 0.0;
};

// Random instances of supervised_loss (w.r.t. logits), info_nce (w.r.t. the
// query), cat_nce (w.r.t. the queries) and the encoder + classifier stack
// (w.r.t. every parameter), each compared against finite_diff_grad.
std::vector<GradcheckSuiteResult> run_gradcheck(std::uint64_t seed,
                                                std::size_t instances);

}  // namespace caco

#endif  // CACO_GRADCHECK_H_
