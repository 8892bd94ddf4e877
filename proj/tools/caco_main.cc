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

// Command-line experiment runner.
//
//   caco train             --spec FILE [--set k=v]... [--out DIR] [--seeds a,b]
//   caco ablate            --spec FILE [--set k=v]... [--out DIR] [--seeds a,b]
//   caco gradcheck         [--spec FILE] [--set k=v]...
//   caco export-embeddings --spec FILE [--set k=v]... [--out DIR]
//                          [--checkpoint FILE]

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caco/checkpoint.h"
#include "caco/errors.h"
#include "caco/experiment.h"
#include "caco/gradcheck.h"
#include "caco/train.h"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string spec_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds;
  std::string checkpoint;
};

caco::ExperimentSpec resolve_spec(const Options& opts) {
  caco::ExperimentSpec spec = opts.spec_path.empty()
                                  ? caco::default_experiment()
                                  : caco::load_experiment(opts.spec_path);
  for (const std::string& o : opts.overrides) caco::apply_override(spec, o);
  return spec;
}

std::vector<std::uint64_t> seed_list(const Options& opts,
                                     const caco::ExperimentSpec& spec) {
  if (!opts.seeds.empty()) return opts.seeds;
  return {spec.train.seed};
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw caco::ConfigError("cannot create output directory " + dir.string() +
                            (ec ? ": " + ec.message() : ""));
  }
  return dir;
}

std::ofstream open_out(const fs::path& path,
                       std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw caco::ConfigError("cannot write " + path.string());
  return out;
}

// Writes metrics.jsonl, summary.csv, keys.jsonl, model.ckpt and the
// resolved spec into dir.
caco::TrainResult run_one(const caco::ExperimentSpec& spec,
                          const fs::path& dir) {
  prepare_dir(dir);
  {
    auto out = open_out(dir / "spec.resolved");
    caco::write_experiment(out, spec);
  }
  const caco::DomainPair pair = caco::make_domain_pair(spec);
  caco::TrainResult result = caco::train(spec.train, pair);

  auto metrics = open_out(dir / "metrics.jsonl");
  caco::write_metrics_jsonl(metrics, result.metrics);
  auto summary = open_out(dir / "summary.csv");
  caco::write_summary_header(summary);
  if (!result.metrics.epochs.empty()) {
    caco::write_summary_row(
        summary, {std::string(caco::variant_name(spec.train.variant)),
                  spec.train.seed, result.metrics.epochs.back()});
  }
  auto keys = open_out(dir / "keys.jsonl");
  result.dictionary.write_jsonl(keys);
  caco::save_checkpoint(result.model, dir / "model.ckpt");

  std::cerr << "caco: " << caco::variant_name(spec.train.variant) << " seed "
            << spec.train.seed << ": " << result.metrics.epochs.size()
            << " epochs in " << result.metrics.wall_clock_seconds << " s";
  if (!result.metrics.epochs.empty()) {
    std::cerr << ", target accuracy "
              << result.metrics.epochs.back().target_accuracy;
  }
  std::cerr << '\n';
  return result;
}

int cmd_train(const Options& opts) {
  caco::ExperimentSpec spec = resolve_spec(opts);
  const auto seeds = seed_list(opts, spec);
  const fs::path out = prepare_dir(opts.out_dir);
  for (std::uint64_t seed : seeds) {
    spec.train.seed = seed;
    run_one(spec, seeds.size() == 1 ? out
                                    : out / ("seed_" + std::to_string(seed)));
  }
  return 0;
}

int cmd_ablate(const Options& opts) {
  caco::ExperimentSpec spec = resolve_spec(opts);
  const auto seeds = seed_list(opts, spec);
  const fs::path out = prepare_dir(opts.out_dir);
  auto table = open_out(out / "ablation.csv");
  caco::write_summary_header(table);
  const caco::Variant variants[] = {caco::Variant::kBaseline,
                                    caco::Variant::kSourceKeys,
                                    caco::Variant::kTargetKeys,
                                    caco::Variant::kFull};
  std::map<std::string, double> mean_accuracy;
  for (caco::Variant variant : variants) {
    const std::string name(caco::variant_name(variant));
    for (std::uint64_t seed : seeds) {
      spec.train.variant = variant;
      spec.train.seed = seed;
      const caco::TrainResult result =
          run_one(spec, out / name / ("seed_" + std::to_string(seed)));
      caco::EpochMetrics last;
      if (!result.metrics.epochs.empty()) last = result.metrics.epochs.back();
      caco::write_summary_row(table, {name, seed, last});
      mean_accuracy[name] += last.target_accuracy / seeds.size();
    }
  }
  for (caco::Variant variant : variants) {
    const std::string name(caco::variant_name(variant));
    std::printf("%-8s mean target accuracy %.4f over %zu seed(s)\n",
                name.c_str(), mean_accuracy[name], seeds.size());
  }
  return 0;
}

int cmd_gradcheck(const Options& opts) {
  const caco::ExperimentSpec spec = resolve_spec(opts);
  double worst = 0.0;
  for (const auto& r : caco::run_gradcheck(spec.train.seed, 50)) {
    std::printf("%-20s instances=%zu max_rel_err=%.3e\n", r.name.c_str(),
                r.instances, r.max_relative_error);
    worst = std::max(worst, r.max_relative_error);
  }
  std::printf("max relative error %.3e (tolerance %.0e)\n", worst,
              caco::kGradcheckTolerance);
  return worst <= caco::kGradcheckTolerance ? 0 : 1;
}

int cmd_export_embeddings(const Options& opts) {
  const caco::ExperimentSpec spec = resolve_spec(opts);
  const fs::path out = prepare_dir(opts.out_dir);
  const caco::DomainPair pair = caco::make_domain_pair(spec);
  const caco::Model model = opts.checkpoint.empty()
                                ? run_one(spec, out).model
                                : caco::load_checkpoint(opts.checkpoint);

  auto csv = open_out(out / "embeddings.csv");
  const std::size_t dim = model.encoders.query.spec.embed_dim();
  for (std::size_t j = 0; j < dim; ++j) csv << 'e' << (j + 1) << ',';
  csv << "label,prediction,domain\n";
  const auto emit = [&](const std::vector<caco::LabeledSample>& samples,
                        caco::Domain domain) {
    const caco::Tensor x = caco::stack_features(samples);
    const caco::Tensor e = caco::encode(model.encoders.query, x);
    const std::vector<std::size_t> predicted = model.predict(x);
    char buf[32];
    for (std::size_t r = 0; r < e.rows(); ++r) {
      for (double v : e.row(r)) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        csv << buf << ',';
      }
      csv << samples[r].y.index() << ',' << predicted[r] << ','
          << caco::domain_name(domain) << '\n';
    }
  };
  emit(pair.source, caco::Domain::kSource);
  emit(pair.target, caco::Domain::kTarget);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Category contrast for unsupervised domain adaptation"};
  app.require_subcommand(1);
  Options opts;

  const auto add_common = [&](CLI::App* sub, bool spec_required) {
    auto* spec = sub->add_option("--spec", opts.spec_path,
                                 "key=value experiment spec file");
    if (spec_required) spec->required();
    sub->add_option("--set", opts.overrides, "override, key=value (repeatable)")
        ->allow_extra_args(false);
    sub->add_option("--out", opts.out_dir, "output directory");
  };

  auto* train = app.add_subcommand("train", "train one run per seed");
  add_common(train, true);
  train->add_option("--seeds", opts.seeds, "comma-separated root seeds")
      ->delimiter(',');

  auto* ablate = app.add_subcommand(
      "ablate", "baseline, S, T and full over a shared seed list");
  add_common(ablate, true);
  ablate->add_option("--seeds", opts.seeds, "comma-separated root seeds")
      ->delimiter(',');

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient suites");
  add_common(gradcheck, false);

  auto* export_cmd = app.add_subcommand(
      "export-embeddings", "write query-encoder embeddings as CSV");
  add_common(export_cmd, true);
  export_cmd->add_option("--checkpoint", opts.checkpoint,
                         "use this checkpoint instead of training");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train) return cmd_train(opts);
    if (*ablate) return cmd_ablate(opts);
    if (*gradcheck) return cmd_gradcheck(opts);
    if (*export_cmd) return cmd_export_embeddings(opts);
  } catch (const std::exception& e) {
    std::cerr << "caco: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
