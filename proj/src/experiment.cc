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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

#include "caco/errors.h"

namespace caco {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "': expected a number, got '" +
                      std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) +
                      "': expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

template <typename Parse>
auto parse_list(std::string_view text, Parse parse) {
  std::vector<decltype(parse(std::string_view{}))> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse(trim(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

struct Field {
  std::function<void(ExperimentSpec&, std::string_view key, std::string_view)>
      set;
  std::function<std::string(const ExperimentSpec&)> get;
};

const std::map<std::string, Field, std::less<>>& fields() {
  static const auto* table = [] {
    auto* t = new std::map<std::string, Field, std::less<>>;
    auto count = [](auto getter) {
      return Field{
          [getter](ExperimentSpec& s, std::string_view k, std::string_view v) {
            getter(s) = static_cast<std::size_t>(parse_unsigned(k, v));
          },
          [getter](const ExperimentSpec& s) {
            return std::to_string(getter(s));
          }};
    };
    auto real = [](auto getter) {
      return Field{
          [getter](ExperimentSpec& s, std::string_view k, std::string_view v) {
            getter(s) = parse_real(k, v);
          },
          [getter](const ExperimentSpec& s) {
            return format_real(getter(s));
          }};
    };
    (*t)["data.classes"] =
        count([](auto& s) -> auto& { return s.mixture.num_categories; });
    (*t)["data.dim"] =
        count([](auto& s) -> auto& { return s.mixture.dim; });
    (*t)["data.n_per_class"] =
        count([](auto& s) -> auto& { return s.mixture.n_per_class; });
    (*t)["data.separation"] =
        real([](auto& s) -> auto& { return s.mixture.separation; });
    (*t)["data.rotation"] =
        real([](auto& s) -> auto& { return s.shift.angle; });
    (*t)["data.scale"] =
        real([](auto& s) -> auto& { return s.shift.scale; });
    (*t)["data.translation"] = Field{
        [](ExperimentSpec& s, std::string_view k, std::string_view v) {
          s.shift.translation =
              parse_list(v, [k](std::string_view x) { return parse_real(k, x); });
        },
        [](const ExperimentSpec& s) { return join(s.shift.translation); }};
    (*t)["train.variant"] = Field{
        [](ExperimentSpec& s, std::string_view, std::string_view v) {
          s.train.variant = parse_variant(v);
        },
        [](const ExperimentSpec& s) {
          return std::string(variant_name(s.train.variant));
        }};
    (*t)["train.epochs"] =
        count([](auto& s) -> auto& { return s.train.epochs; });
    (*t)["train.batch_size"] =
        count([](auto& s) -> auto& { return s.train.batch_size; });
    (*t)["train.lr"] =
        real([](auto& s) -> auto& { return s.train.learning_rate; });
    (*t)["train.sgd_momentum"] =
        real([](auto& s) -> auto& { return s.train.sgd_momentum; });
    (*t)["train.b"] =
        real([](auto& s) -> auto& { return s.train.encoder_momentum; });
    (*t)["train.tau"] =
        real([](auto& s) -> auto& { return s.train.tau_base; });
    (*t)["train.M"] =
        count([](auto& s) -> auto& { return s.train.queue_size; });
    (*t)["train.lambda"] =
        real([](auto& s) -> auto& { return s.train.lambda; });
    (*t)["train.seed"] = Field{
        [](ExperimentSpec& s, std::string_view k, std::string_view v) {
          s.train.seed = parse_unsigned(k, v);
        },
        [](const ExperimentSpec& s) { return std::to_string(s.train.seed); }};
    (*t)["train.hidden"] = Field{
        [](ExperimentSpec& s, std::string_view k, std::string_view v) {
          s.train.hidden = parse_list(v, [k](std::string_view x) {
            return static_cast<std::size_t>(parse_unsigned(k, x));
          });
        },
        [](const ExperimentSpec& s) { return join(s.train.hidden); }};
    (*t)["train.embed_dim"] =
        count([](auto& s) -> auto& { return s.train.embed_dim; });
    return t;
  }();
  return *table;
}

}  // namespace

ExperimentSpec default_experiment() {
  ExperimentSpec spec;
  spec.shift.angle = std::numbers::pi / 4.0;
  return spec;
}

void set_spec_value(ExperimentSpec& spec, std::string_view key,
                    std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) {
    throw ConfigError("unknown spec key '" + std::string(key) + "'");
  }
  it->second.set(spec, key, trim(value));
}

void apply_override(ExperimentSpec& spec, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) +
                      "' is not of the form key=value");
  }
  set_spec_value(spec, trim(assignment.substr(0, eq)),
                 assignment.substr(eq + 1));
}

ExperimentSpec parse_experiment(std::istream& in) {
  ExperimentSpec spec = default_experiment();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    try {
      apply_override(spec, view);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read spec file " + path.string());
  return parse_experiment(in);
}

const std::vector<std::string>& known_spec_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, field] : fields()) out.push_back(key);
    return out;
  }();
  return keys;
}

void write_experiment(std::ostream& out, const ExperimentSpec& spec) {
  for (const auto& [key, field] : fields()) {
    out << key << '=' << field.get(spec) << '\n';
  }
}

DomainPair make_domain_pair(const ExperimentSpec& spec) {
  return make_domain_pair(spec.mixture, spec.shift, spec.train.seed);
}

}  // namespace caco
