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

#include "caco/experiment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "caco/errors.h"
#include "gtest/gtest.h"

namespace caco {
namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment(in);
}

TEST(ExperimentTest, DefaultsApplyWhenEmpty) {
  const ExperimentSpec spec = parse("# nothing here\n\n");
  EXPECT_EQ(spec.mixture.num_categories, 4u);
  EXPECT_EQ(spec.mixture.dim, 8u);
  EXPECT_DOUBLE_EQ(spec.shift.angle, std::numbers::pi / 4.0);
  EXPECT_EQ(spec.train.variant, Variant::kFull);
  EXPECT_EQ(spec.train.queue_size, 100u);
}

TEST(ExperimentTest, ParsesEveryKind) {
  const ExperimentSpec spec = parse(
      "data.classes = 3  # trailing comment\n"
      "data.dim=5\n"
      "data.translation=1,2,3,4,5\n"
      "train.variant=T\n"
      "train.hidden=32, 8\n"
      "train.lr=0.05\n"
      "train.seed=123\n");
  EXPECT_EQ(spec.mixture.num_categories, 3u);
  EXPECT_EQ(spec.mixture.dim, 5u);
  EXPECT_EQ(spec.shift.translation,
            (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_EQ(spec.train.variant, Variant::kTargetKeys);
  EXPECT_EQ(spec.train.hidden, (std::vector<std::size_t>{32, 8}));
  EXPECT_DOUBLE_EQ(spec.train.learning_rate, 0.05);
  EXPECT_EQ(spec.train.seed, 123u);
}

TEST(ExperimentTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse("train.colour=blue\n"), ConfigError);
  EXPECT_THROW(parse("train.epochs=many\n"), ConfigError);
  EXPECT_THROW(parse("train.epochs 3\n"), ConfigError);
  EXPECT_THROW(parse("train.variant=both\n"), ConfigError);
}

TEST(ExperimentTest, OverridesReplaceValues) {
  ExperimentSpec spec = default_experiment();
  apply_override(spec, "train.lambda=0");
  apply_override(spec, "data.rotation=0.5");
  EXPECT_EQ(spec.train.lambda, 0.0);
  EXPECT_EQ(spec.shift.angle, 0.5);
  EXPECT_THROW(apply_override(spec, "lambda"), ConfigError);
  EXPECT_THROW(apply_override(spec, "train.nope=1"), ConfigError);
}

TEST(ExperimentTest, WrittenFormParsesBackIdentically) {
  ExperimentSpec spec = default_experiment();
  apply_override(spec, "data.translation=0.1,0,0,0,0,0,0,-3");
  apply_override(spec, "train.hidden=7,9,11");
  std::ostringstream first;
  write_experiment(first, spec);
  const ExperimentSpec back = parse(first.str());
  std::ostringstream second;
  write_experiment(second, back);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(back.shift.angle, spec.shift.angle);
}

TEST(ExperimentTest, KnownKeysCoverWrittenKeys) {
  std::ostringstream out;
  write_experiment(out, default_experiment());
  std::istringstream lines(out.str());
  std::string line;
  const auto& keys = known_spec_keys();
  while (std::getline(lines, line)) {
    const std::string key = line.substr(0, line.find('='));
    EXPECT_NE(std::find(keys.begin(), keys.end(), key), keys.end()) << key;
  }
  EXPECT_EQ(keys.size(), 19u);
}

}  // namespace
}  // namespace caco
