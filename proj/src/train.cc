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

#include "caco/train.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include "caco/errors.h"
#include "caco/losses.h"
#include "caco/pseudo_label.h"
#include "json.hpp"

namespace caco {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
  if (!(sgd_momentum >= 0.0 && sgd_momentum < 1.0)) {
    throw ParameterError("sgd_momentum must lie in [0, 1)");
  }
  if (!(encoder_momentum >= 0.0 && encoder_momentum <= 1.0)) {
    throw ParameterError("encoder momentum b must lie in [0, 1]");
  }
  if (!(tau_base > 0.0)) throw ParameterError("tau_base must be > 0");
  if (queue_size == 0) throw ParameterError("queue size M must be >= 1");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (variant == Variant::kFull && batch_size % 2 != 0) {
    throw ParameterError("the full variant needs an even batch_size");
  }
}

MlpSpec TrainConfig::mlp_spec(std::size_t input_dim) const {
  MlpSpec spec;
  spec.layer_widths.push_back(input_dim);
  spec.layer_widths.insert(spec.layer_widths.end(), hidden.begin(),
                           hidden.end());
  spec.layer_widths.push_back(embed_dim);
  spec.validate();
  return spec;
}

void SgdMomentum::step(std::span<Tensor* const> params,
                       std::span<const Tensor> grads) {
  if (params.size() != grads.size()) {
    throw ContractError("SgdMomentum: params and grads differ in count");
  }
  if (velocity_.empty()) {
    for (Tensor* p : params) velocity_.emplace_back(p->shape());
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t]->values();
    auto g = grads[t].values();
    auto v = velocity_[t].values();
    if (g.size() != p.size()) throw DimensionError("SgdMomentum: grad shape");
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = momentum_ * v[i] + g[i];
      p[i] -= learning_rate_ * v[i];
    }
  }
}

namespace {

Model init_model(const TrainConfig& config, const TrainingData& data) {
  const MlpSpec spec = config.mlp_spec(data.source_x.cols());
  Model model;
  model.seed = config.seed;
  model.encoders = EncoderPair::from_query(
      init_params(spec, derive_seed(config.seed, "init.encoder")),
      config.encoder_momentum);
  model.classifier =
      init_classifier(config.embed_dim, data.num_categories,
                      derive_seed(config.seed, "init.classifier"));
  return model;
}

Tensor gather_rows(const Tensor& from, std::span<const std::size_t> rows) {
  Tensor out(Shape{rows.size(), from.cols()});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = from.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::vector<CategoryLabel> argmax_labels(const Tensor& probs) {
  std::vector<CategoryLabel> labels;
  labels.reserve(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    labels.push_back(assign_pseudo_label(probs.row(r)));
  }
  return labels;
}

}  // namespace

namespace {

TrainConfig validated(TrainConfig config) {
  config.validate();
  return config;
}

}  // namespace

Trainer::Trainer(TrainConfig config, TrainingData data)
    : config_(validated(std::move(config))),
      data_(std::move(data)),
      model_(init_model(config_, data_)),
      dictionary_(data_.num_categories, config_.queue_size),
      optimizer_(config_.learning_rate, config_.sgd_momentum),
      source_rng_(Rng::stream(config_.seed, "batch.source")),
      key_rng_(Rng::stream(config_.seed, "batch.keys")),
      query_rng_(Rng::stream(config_.seed, "batch.queries")) {
  if (data_.num_categories < 2) {
    throw ParameterError("training needs at least two categories");
  }
}

StepReport Trainer::step(std::span<const std::size_t> source_rows) {
  StepReport report;
  Tape tape;
  ParamSet& query_params = model_.encoders.query;
  std::vector<Var> query_vars;
  for (const Tensor& t : query_params.tensors) {
    Tensor leaf = t;
    query_vars.push_back(tape.leaf(std::move(leaf.set_requires_grad())));
  }
  Tensor w = model_.classifier.weight;
  Tensor b = model_.classifier.bias;
  Var weight = tape.leaf(std::move(w.set_requires_grad()));
  Var bias = tape.leaf(std::move(b.set_requires_grad()));

  // Supervised term on labeled source rows.
  std::vector<CategoryLabel> source_labels;
  source_labels.reserve(source_rows.size());
  for (std::size_t row : source_rows) source_labels.push_back(data_.source_y.at(row));
  Var source_embed =
      encode(query_vars, tape.constant(gather_rows(data_.source_x, source_rows)));
  LossValue sup = supervised_loss(
      classifier_logits(weight, bias, source_embed), source_labels);
  report.loss_sup = sup.item();
  Var objective = sup.value;

  if (config_.variant != Variant::kBaseline) {
    // Keys: momentum encoder, no tape; labels and temperatures frozen now.
    KeyBatch keys =
        sample_key_batch(data_, config_.batch_size, config_.variant, key_rng_);
    const Tensor key_embed = encode(model_.encoders.key, keys.x);
    const Tensor key_probs = classify(model_.classifier, key_embed);
    for (std::size_t i = 0; i < key_embed.rows(); ++i) {
      auto probs = key_probs.row(i);
      const CategoryLabel label =
          key_label(keys.domains[i], keys.ground_truth[i], probs);
      auto vec = key_embed.row(i);
      dictionary_.enqueue(CategoricalKey{
          std::vector<double>(vec.begin(), vec.end()), label.index(),
          key_temperature(config_.tau_base, prediction_entropy(probs),
                          data_.num_categories),
          keys.domains[i], 0});
    }
    report.keys_enqueued = key_embed.rows();

    if (dictionary_.is_warm()) {
      QueryBatch queries =
          sample_query_batch(data_, config_.batch_size, query_rng_);
      Var query_embed = encode(query_vars, tape.constant(queries.x));
      const std::vector<CategoryLabel> query_labels =
          argmax_labels(classify(model_.classifier, query_embed.value()));
      LossValue contrast = cat_nce(query_embed, query_labels, dictionary_);
      report.loss_catnce = contrast.item();
      if (config_.lambda != 0.0) {
        objective = add(objective, scale(contrast.value, config_.lambda));
      }
    }
  }

  const Gradients grads = backward(objective);
  std::vector<Tensor*> params;
  std::vector<Tensor> param_grads;
  for (std::size_t t = 0; t < query_params.tensors.size(); ++t) {
    params.push_back(&query_params.tensors[t]);
    param_grads.push_back(grads[query_vars[t]]);
  }
  params.push_back(&model_.classifier.weight);
  param_grads.push_back(grads[weight]);
  params.push_back(&model_.classifier.bias);
  param_grads.push_back(grads[bias]);
  optimizer_.step(params, param_grads);

  momentum_update(model_.encoders);
  return report;
}

std::vector<StepReport> Trainer::run_epoch() {
  const std::size_t n = data_.source_size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), source_rng_.engine());
  std::vector<StepReport> reports;
  for (std::size_t start = 0; start < n; start += config_.batch_size) {
    const std::size_t stop = std::min(n, start + config_.batch_size);
    reports.push_back(step(std::span<const std::size_t>(order).subspan(
        start, stop - start)));
  }
  return reports;
}

std::vector<std::size_t> Trainer::target_pseudo_labels() const {
  return model_.predict(data_.target_x);
}

EvaluationReport evaluate_predictions(std::span<const std::size_t> predicted,
                                      std::span<const LabeledSample> samples) {
  if (samples.empty()) throw ContractError("evaluate: no samples");
  if (predicted.size() != samples.size()) {
    throw ContractError("evaluate: prediction count mismatch");
  }
  const std::size_t categories = samples.front().y.num_categories();
  std::vector<std::size_t> hits(categories, 0), totals(categories, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t truth = samples[i].y.index();
    ++totals[truth];
    if (predicted[i] == truth) {
      ++hits[truth];
      ++correct;
    }
  }
  EvaluationReport report;
  report.accuracy =
      static_cast<double>(correct) / static_cast<double>(samples.size());
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < categories; ++c) {
    if (totals[c] == 0) {
      report.per_class.push_back(std::nullopt);
      report.missing_class = true;
      continue;
    }
    const double acc =
        static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
    report.per_class.push_back(acc);
    sum += acc;
    ++present;
  }
  report.mean_per_class = sum / static_cast<double>(present);
  return report;
}

EvaluationReport evaluate(const Model& model,
                          std::span<const LabeledSample> samples) {
  if (samples.empty()) throw ContractError("evaluate: no samples");
  return evaluate_predictions(model.predict(stack_features(samples)), samples);
}

double pseudo_label_churn(std::span<const std::size_t> labels_now,
                          std::span<const std::size_t> labels_prev) {
  if (labels_now.size() != labels_prev.size()) {
    throw ContractError("pseudo_label_churn: length mismatch");
  }
  if (labels_now.empty()) return 0.0;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < labels_now.size(); ++i) {
    if (labels_now[i] != labels_prev[i]) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(labels_now.size());
}

std::optional<std::size_t> RunMetrics::first_warm_epoch() const {
  for (const EpochMetrics& e : epochs) {
    if (e.catnce_steps > 0) return e.epoch;
  }
  return std::nullopt;
}

std::optional<std::size_t> RunMetrics::first_fully_warm_epoch() const {
  for (const EpochMetrics& e : epochs) {
    if (e.steps > 0 && e.catnce_steps == e.steps) return e.epoch;
  }
  return std::nullopt;
}

namespace {

TrainResult run_training(const TrainConfig& config, const DomainPair& pair) {
  const auto started = std::chrono::steady_clock::now();
  Trainer trainer(config, pair.training_view());
  TrainResult result{trainer.model(), {}, trainer.dictionary()};

  std::vector<std::size_t> previous = trainer.target_pseudo_labels();
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<StepReport> steps = trainer.run_epoch();
    EpochMetrics m;
    m.epoch = epoch;
    m.steps = steps.size();
    double catnce_total = 0.0;
    for (const StepReport& s : steps) {
      m.loss_sup += s.loss_sup;
      if (s.loss_catnce) {
        catnce_total += *s.loss_catnce;
        ++m.catnce_steps;
      }
    }
    m.loss_sup /= static_cast<double>(steps.size());
    if (m.catnce_steps > 0) {
      m.loss_catnce = catnce_total / static_cast<double>(m.catnce_steps);
    }
    const std::vector<std::size_t> current = trainer.target_pseudo_labels();
    // Evaluation reads held-out target labels; the trainer never does.
    const EvaluationReport eval = evaluate_predictions(current, pair.target);
    m.target_accuracy = eval.accuracy;
    m.mean_class_accuracy = eval.mean_per_class;
    m.churn = pseudo_label_churn(current, previous);
    const CategoricalDictionary& dict = trainer.dictionary();
    if (dict.total_enqueued() > 0) {
      m.source_key_fraction = static_cast<double>(dict.source_enqueued()) /
                              static_cast<double>(dict.total_enqueued());
    }
    result.metrics.epochs.push_back(m);
    previous = current;
  }
  result.model = trainer.model();
  result.dictionary = trainer.dictionary();
  result.metrics.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

}  // namespace

TrainResult train_source_only(const TrainConfig& config,
                              const DomainPair& pair) {
  if (config.variant != Variant::kBaseline) {
    throw ContractError("train_source_only needs the baseline variant");
  }
  return run_training(config, pair);
}

TrainResult train_caco(const TrainConfig& config, const DomainPair& pair) {
  if (config.variant == Variant::kBaseline) {
    throw ContractError("train_caco needs variant S, T or full");
  }
  return run_training(config, pair);
}

TrainResult train(const TrainConfig& config, const DomainPair& pair) {
  return config.variant == Variant::kBaseline ? train_source_only(config, pair)
                                              : train_caco(config, pair);
}

void write_metrics_jsonl(std::ostream& out, const RunMetrics& metrics) {
  for (const EpochMetrics& m : metrics.epochs) {
    nlohmann::ordered_json record;
    record["epoch"] = m.epoch;
    record["loss_sup"] = m.loss_sup;
    record["loss_catnce"] = m.loss_catnce
                                ? nlohmann::ordered_json(*m.loss_catnce)
                                : nlohmann::ordered_json(nullptr);
    record["steps"] = m.steps;
    record["catnce_steps"] = m.catnce_steps;
    record["target_accuracy"] = m.target_accuracy;
    record["mean_class_accuracy"] = m.mean_class_accuracy;
    record["churn"] = m.churn;
    record["source_key_fraction"] = m.source_key_fraction;
    out << record.dump() << '\n';
  }
}

void write_summary_header(std::ostream& out) {
  out << "variant,seed,epochs,target_accuracy,mean_class_accuracy,churn,"
         "loss_sup,loss_catnce\n";
}

void write_summary_row(std::ostream& out, const SummaryRow& row) {
  const EpochMetrics& m = row.final;
  const auto num = [](double v) { return nlohmann::json(v).dump(); };
  out << row.variant << ',' << row.seed << ',' << m.epoch << ','
      << num(m.target_accuracy) << ',' << num(m.mean_class_accuracy) << ','
      << num(m.churn) << ',' << num(m.loss_sup) << ','
      << (m.loss_catnce ? num(*m.loss_catnce) : std::string()) << '\n';
}

}  // namespace caco
