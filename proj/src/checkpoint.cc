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

#include "caco/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "caco/errors.h"
#include "json.hpp"

namespace caco {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "caco-checkpoint";
constexpr int kFormatVersion = 1;

std::vector<std::pair<std::string, const Tensor*>> tensor_table(
    const Model& model) {
  std::vector<std::pair<std::string, const Tensor*>> table;
  const auto add_encoder = [&](const char* prefix, const ParamSet& params) {
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
      const char kind = i % 2 == 0 ? 'w' : 'b';
      table.emplace_back(std::string(prefix) + "." + kind +
                             std::to_string(i / 2),
                         &params.tensors[i]);
    }
  };
  add_encoder("query", model.encoders.query);
  add_encoder("key", model.encoders.key);
  table.emplace_back("classifier.weight", &model.classifier.weight);
  table.emplace_back("classifier.bias", &model.classifier.bias);
  return table;
}

void write_f64_le(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double read_f64_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw ConfigError("checkpoint: truncated tensor data");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

Tensor read_tensor(std::istream& in, const json& entry,
                   const std::string& expected_name) {
  if (entry.at("name").get<std::string>() != expected_name) {
    throw ConfigError("checkpoint: expected tensor " + expected_name +
                      ", found " + entry.at("name").get<std::string>());
  }
  Shape shape = entry.at("shape").get<Shape>();
  std::vector<double> values(shape_volume(shape));
  for (double& v : values) v = read_f64_le(in);
  return Tensor(std::move(shape), std::move(values));
}

}  // namespace

void save_checkpoint(const Model& model, std::ostream& out) {
  json header;
  header["format"] = kFormatTag;
  header["version"] = kFormatVersion;
  header["spec"] = {{"layer_widths", model.encoders.query.spec.layer_widths}};
  header["seed"] = model.seed;
  header["momentum"] = model.encoders.momentum;
  header["categories"] = model.classifier.num_categories();
  const auto table = tensor_table(model);
  json tensors = json::array();
  for (const auto& [name, tensor] : table) {
    tensors.push_back({{"name", name}, {"shape", tensor->shape()}});
  }
  header["tensors"] = std::move(tensors);
  out << header.dump() << '\n';
  for (const auto& entry : table) {
    for (double v : entry.second->values()) write_f64_le(out, v);
  }
  if (!out) throw ConfigError("checkpoint: write failed");
}

Model load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint: missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (header.value("format", "") != kFormatTag ||
      header.value("version", 0) != kFormatVersion) {
    throw ConfigError("checkpoint: unsupported format");
  }
  MlpSpec spec{header.at("spec").at("layer_widths").get<std::vector<std::size_t>>()};
  spec.validate();
  const json& entries = header.at("tensors");
  const std::size_t per_encoder = 2 * spec.num_layers();
  if (entries.size() != 2 * per_encoder + 2) {
    throw ConfigError("checkpoint: tensor count does not match spec");
  }

  Model model;
  model.seed = header.at("seed").get<std::uint64_t>();
  model.encoders.momentum = header.at("momentum").get<double>();
  model.encoders.query.spec = spec;
  model.encoders.key.spec = spec;
  std::size_t next = 0;
  const auto read_encoder = [&](const char* prefix, ParamSet& params) {
    for (std::size_t i = 0; i < per_encoder; ++i) {
      const char kind = i % 2 == 0 ? 'w' : 'b';
      params.tensors.push_back(read_tensor(
          in, entries[next++],
          std::string(prefix) + "." + kind + std::to_string(i / 2)));
    }
  };
  read_encoder("query", model.encoders.query);
  read_encoder("key", model.encoders.key);
  model.classifier.weight = read_tensor(in, entries[next++], "classifier.weight");
  model.classifier.bias = read_tensor(in, entries[next++], "classifier.bias");
  return model;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  save_checkpoint(model, out);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace caco
