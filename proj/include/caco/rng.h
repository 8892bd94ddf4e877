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

#ifndef CACO_RNG_H_
#define CACO_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace caco {

// Child seed for a named stream: splitmix64(root ^ fnv1a64(name)).
// Every random draw in a run comes from a stream derived this way, so
// consumers never share state and adding one does not perturb the others.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t root, std::string_view name) {
    return Rng(derive_seed(root, name));
  }

  std::mt19937_64& engine() { return engine_; }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace caco

#endif  // CACO_RNG_H_
