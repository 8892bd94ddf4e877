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

#ifndef CACO_TRAIN_H_
#define CACO_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caco/data.h"
#include "caco/dictionary.h"
#include "caco/model.h"

namespace caco {

struct TrainConfig {
  Variant variant = Variant::kFull;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;  // source, query and key batches alike
  double learning_rate = 0.001;
  double sgd_momentum = 0.9;
  double encoder_momentum = 0.999;  // b
  double tau_base = 0.07;
  std::size_t queue_size = 100;  // M
  double lambda = 1.0;           // weight of the category contrast term
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t embed_dim = 16;

  void validate() const;
  MlpSpec mlp_spec(std::size_t input_dim) const;
};

// Classical momentum SGD: v <- mu v + g; p <- p - lr v.
class SgdMomentum {
 public:
  SgdMomentum(double learning_rate, double momentum)
      : learning_rate_(learning_rate), momentum_(momentum) {}

  void step(std::span<Tensor* const> params, std::span<const Tensor> grads);

 private:
  double learning_rate_;
  double momentum_;
  std::vector<Tensor> velocity_;
};

struct StepReport {
  double loss_sup = 0.0;
  std::optional<double> loss_catnce;  // set only once the dictionary is warm
  std::size_t keys_enqueued = 0;
};

// One CaCo (or source-only) optimisation loop. Sees only TrainingData, so
// target labels are out of reach by construction.
class Trainer {
 public:
  Trainer(TrainConfig config, TrainingData data);

  // One step on the given source rows.
  StepReport step(std::span<const std::size_t> source_rows);

  // Without-replacement pass over the source set; returns per-step reports.
  std::vector<StepReport> run_epoch();

  // argmax predictions of the current model on every target row.
  std::vector<std::size_t> target_pseudo_labels() const;

  const Model& model() const { return model_; }
  const CategoricalDictionary& dictionary() const { return dictionary_; }
  const TrainConfig& config() const { return config_; }
  const TrainingData& data() const { return data_; }

 private:
  TrainConfig config_;
  TrainingData data_;
  Model model_;
  CategoricalDictionary dictionary_;
  SgdMomentum optimizer_;
  Rng source_rng_;
  Rng key_rng_;
  Rng query_rng_;
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::vector<std::optional<double>> per_class;  // nullopt: class absent
  double mean_per_class = 0.0;                   // over present classes
  bool missing_class = false;
};

EvaluationReport evaluate(const Model& model,
                          std::span<const LabeledSample> samples);
EvaluationReport evaluate_predictions(std::span<const std::size_t> predicted,
                                      std::span<const LabeledSample> samples);

// Fraction of positions whose label differs.
double pseudo_label_churn(std::span<const std::size_t> labels_now,
                          std::span<const std::size_t> labels_prev);

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double loss_sup = 0.0;
  std::optional<double> loss_catnce;  // mean over warm steps, if any
  std::size_t steps = 0;
  std::size_t catnce_steps = 0;
  double target_accuracy = 0.0;
  double mean_class_accuracy = 0.0;
  double churn = 0.0;  // against the previous epoch (or the initial model)
  double source_key_fraction = 0.0;  // cumulative over all enqueued keys
};

struct RunMetrics {
  std::vector<EpochMetrics> epochs;
  double wall_clock_seconds = 0.0;

  // First epoch containing a CatNCE step.
  std::optional<std::size_t> first_warm_epoch() const;
  // First epoch in which every step had a warm dictionary.
  std::optional<std::size_t> first_fully_warm_epoch() const;
};

struct TrainResult {
  Model model;
  RunMetrics metrics;
  CategoricalDictionary dictionary;
};

// Supervised loss on source only; config.variant must be kBaseline.
TrainResult train_source_only(const TrainConfig& config,
                              const DomainPair& pair);
// config.variant must be kSourceKeys, kTargetKeys or kFull.
TrainResult train_caco(const TrainConfig& config, const DomainPair& pair);
// Dispatches on config.variant.
TrainResult train(const TrainConfig& config, const DomainPair& pair);

// One JSON object per epoch. Wall-clock time is not written.
void write_metrics_jsonl(std::ostream& out, const RunMetrics& metrics);

struct SummaryRow {
  std::string variant;
  std::uint64_t seed = 0;
  EpochMetrics final;
};
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SummaryRow& row);

}  // namespace caco

#endif  // CACO_TRAIN_H_
