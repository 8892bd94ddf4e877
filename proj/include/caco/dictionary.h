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

#ifndef CACO_DICTIONARY_H_
#define CACO_DICTIONARY_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "caco/pseudo_label.h"

namespace caco {

// A unit-norm key filed under one category. The temperature is fixed when
// the key is enqueued.
struct CategoricalKey {
  std::vector<double> vector;
  std::size_t category = 0;
  double temperature = 0.07;
  Domain domain = Domain::kSource;
  std::uint64_t age = 0;  // assigned by the dictionary on enqueue
};

// Allowed deviation of ||key|| from 1.
inline constexpr double kKeyNormTolerance = 1e-9;

// C per-category FIFO queues of capacity M. Keys are immutable once
// enqueued; copying the dictionary yields an independent snapshot.
class CategoricalDictionary {
 public:
  CategoricalDictionary(std::size_t num_categories, std::size_t capacity);

  // Appends to queue key.category, dropping that queue's oldest key first if
  // it is full. Returns the age given to the key (1, 2, ... across queues).
  std::uint64_t enqueue(CategoricalKey key);

  // The slot-th newest key of every category (slot 0 = newest), in category
  // order. Throws NotWarmError if some queue holds <= slot keys.
  std::vector<CategoricalKey> group(std::size_t slot) const;

  // Every queue holds exactly M keys.
  bool is_warm() const;

  std::size_t num_categories() const { return queues_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Zero until the first key fixes it.
  std::size_t embed_dim() const { return embed_dim_; }
  const std::deque<CategoricalKey>& queue(std::size_t category) const {
    return queues_.at(category);
  }
  std::size_t size() const;

  std::uint64_t total_enqueued() const { return next_age_ - 1; }
  std::uint64_t source_enqueued() const { return source_enqueued_; }

  // One JSON object per key, oldest first within each category.
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<std::deque<CategoricalKey>> queues_;
  std::size_t capacity_;
  std::size_t embed_dim_ = 0;
  std::uint64_t next_age_ = 1;
  std::uint64_t source_enqueued_ = 0;
};

}  // namespace caco

#endif  // CACO_DICTIONARY_H_
