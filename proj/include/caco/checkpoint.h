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

#ifndef CACO_CHECKPOINT_H_
#define CACO_CHECKPOINT_H_

#include <filesystem>
#include <iosfwd>

#include "caco/model.h"

namespace caco {

// Layout: one line of JSON (format tag, MLP spec, seed, momentum, and the
// name and shape of every tensor), a '\n', then each tensor's values as
// little-endian IEEE-754 binary64 in header order. Tensor order is
// query.w0, query.b0, ..., key.w0, key.b0, ..., classifier.weight,
// classifier.bias.
void save_checkpoint(const Model& model, std::ostream& out);
Model load_checkpoint(std::istream& in);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace caco

#endif  // CACO_CHECKPOINT_H_
