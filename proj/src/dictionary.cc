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

#include "caco/dictionary.h"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "caco/errors.h"
#include "caco/tensor.h"
#include "json.hpp"

namespace caco {

CategoricalDictionary::CategoricalDictionary(std::size_t num_categories,
                                             std::size_t capacity)
    : queues_(num_categories), capacity_(capacity) {
  if (num_categories == 0) throw ParameterError("dictionary needs C >= 1");
  if (capacity == 0) throw ParameterError("dictionary needs M >= 1");
}

std::uint64_t CategoricalDictionary::enqueue(CategoricalKey key) {
  if (key.category >= queues_.size()) {
    throw ContractError("enqueue: category " + std::to_string(key.category) +
                        " out of range for C=" +
                        std::to_string(queues_.size()));
  }
  if (std::abs(l2_norm(key.vector) - 1.0) > kKeyNormTolerance) {
    throw ContractError("enqueue: key is not unit-norm");
  }
  if (!(key.temperature > 0.0)) {
    throw ContractError("enqueue: key temperature must be > 0");
  }
  if (embed_dim_ == 0) {
    embed_dim_ = key.vector.size();
  } else if (key.vector.size() != embed_dim_) {
    throw DimensionError("enqueue: key dim " + std::to_string(key.vector.size()) +
                         " != " + std::to_string(embed_dim_));
  }

  auto& queue = queues_[key.category];
  if (queue.size() == capacity_) queue.pop_front();
  key.age = next_age_++;
  if (key.domain == Domain::kSource) ++source_enqueued_;
  queue.push_back(std::move(key));
  return queue.back().age;
}

std::vector<CategoricalKey> CategoricalDictionary::group(std::size_t slot) const {
  std::vector<CategoricalKey> keys;
  keys.reserve(queues_.size());
  for (const auto& queue : queues_) {
    if (queue.size() <= slot) {
      throw NotWarmError("group: slot " + std::to_string(slot) +
                         " needs more keys than a queue holds (" +
                         std::to_string(queue.size()) + ")");
    }
    keys.push_back(queue[queue.size() - 1 - slot]);
  }
  return keys;
}

bool CategoricalDictionary::is_warm() const {
  for (const auto& queue : queues_) {
    if (queue.size() != capacity_) return false;
  }
  return true;
}

std::size_t CategoricalDictionary::size() const {
  std::size_t n = 0;
  for (const auto& queue : queues_) n += queue.size();
  return n;
}

void CategoricalDictionary::write_jsonl(std::ostream& out) const {
  for (const auto& queue : queues_) {
    for (const CategoricalKey& key : queue) {
      nlohmann::json record = {
          {"category", key.category},
          {"domain", domain_name(key.domain)},
          {"age", key.age},
          {"temperature", key.temperature},
          {"vector", key.vector},
      };
      out << record.dump() << '\n';
    }
  }
}

}  // namespace caco
