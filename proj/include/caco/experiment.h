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

#ifndef CACO_EXPERIMENT_H_
#define CACO_EXPERIMENT_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "caco/data.h"
#include "caco/train.h"

namespace caco {

// Everything needed to reproduce a run. train.seed is the root seed; the
// data, init and batching streams are derived from it (see rng.h).
struct ExperimentSpec {
  MixtureSpec mixture;
  ShiftDescriptor shift;
  TrainConfig train;
};

// C=4, D=8, separation 3, rotation pi/4, 500 samples per class and domain;
// D -> 64 -> 64 -> 16 encoders, M=100, b=0.999, tau=0.07, lambda=1,
// momentum SGD at lr 0.001 for 30 epochs of batch 32.
ExperimentSpec default_experiment();

// Flat key=value lines; '#' starts a comment. Keys are listed by
// known_spec_keys(). Unlisted keys keep their defaults.
ExperimentSpec parse_experiment(std::istream& in);
ExperimentSpec load_experiment(const std::filesystem::path& path);

// "key=value", same keys and syntax as the spec file.
void apply_override(ExperimentSpec& spec, std::string_view assignment);
void set_spec_value(ExperimentSpec& spec, std::string_view key,
                    std::string_view value);

const std::vector<std::string>& known_spec_keys();

// Canonical key=value rendering (round-trips through parse_experiment).
void write_experiment(std::ostream& out, const ExperimentSpec& spec);

DomainPair make_domain_pair(const ExperimentSpec& spec);

}  // namespace caco

#endif  // CACO_EXPERIMENT_H_
