/*
 * Copyright 2026 The FairShift Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "fairshift/dataset.hpp"
#include "fairshift/metrics.hpp"
#include "fairshift/schema.hpp"
#include "fairshift/trainer.hpp"

namespace fairshift {

enum class ModelKind : std::uint8_t { Vanilla, Fair };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);  // ConfigError

struct ExperimentConfig {
  ModelKind model = ModelKind::Vanilla;
  int folds = 10;
  TrainerConfig trainer;
  std::uint64_t seed = 0;
  // Contexts left out of every pooled training set, beyond the deployment
  // context itself.
  std::set<std::string> global_exclude;
  // Pooled training sets larger than this are stratified-subsampled down to
  // it; 0 disables the cap. Recorded in run metadata.
  std::size_t global_row_cap = 0;
  int jobs = 1;

  void validate() const;  // ConfigError
};

// Deterministic stratified k-fold split on the class label: per class, a
// seeded shuffle dealt round-robin, so per-fold class counts differ from
// exact proportionality by at most one row. Every class must have ≥ k
// members.
std::vector<std::vector<std::size_t>> stratified_kfold(
    const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed);

// Seeded class-proportional subsample of up to `cap` rows.
Dataset stratified_subsample(const Dataset& ds, std::size_t cap,
                             std::uint64_t seed);

// Mean over the folds in which a metric was defined.
struct MetricMean {
  double value = 0.0;
  int defined_folds = 0;
};

struct ScoreSummary {
  std::array<MetricMean, 7> metrics{};  // indexed as kMetricNames
  int folds = 0;
};

// Cross-validated evaluation inside one context: each fold model trains on
// the other k−1 folds (reweighed and prejudice-penalized when kind = fair)
// and is scored on its held-out fold. A fold that fails to train raises a
// TrainingError naming the fold.
ScoreSummary run_in_distribution(const Dataset& ds, const Schema& schema,
                                 const ExperimentConfig& cfg);

// One train-context × deploy-context evaluation: fold models from the train
// side, each scored on the full deployment context, averaged per metric.
struct DeploymentCell {
  std::string train_context;
  std::string deploy_context;
  ScoreSummary scores;
};

struct ContextWarning {
  std::string context;
  std::string message;
};

struct DeploymentResult {
  std::vector<DeploymentCell> cells;
  std::vector<ContextWarning> skipped;
};

// Local experiment: per context, k fold models deployed on every other
// context. A context whose models fail to train is skipped and recorded.
DeploymentResult run_local_models(const ContextCollection& coll,
                                  const Schema& schema,
                                  const ExperimentConfig& cfg);

// Global experiment: per deployment context c, fold models trained on the
// pool of all other locals (minus configured exclusions, optionally capped)
// and scored on c. Cells carry the train id "GLOBAL".
DeploymentResult run_global_model(const ContextCollection& coll,
                                  const Schema& schema,
                                  const ExperimentConfig& cfg);

inline constexpr const char* kGlobalTrainId = "GLOBAL";

// Five-number boxplot summary: type-7 linearly interpolated quartiles,
// whiskers at the most extreme values within 1.5·IQR of the quartiles,
// values beyond that flagged as outliers.
struct BoxplotSummary {
  std::size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> outliers;
};

BoxplotSummary aggregate_boxplot(std::vector<double> values);  // DataError if empty

// One summary row per (scope, train context, metric). Scopes:
//   train_context — per local model, over its deployment cells;
//   local_medians — over the per-context medians of the above;
//   global        — over the global model's per-deployment cells.
// n = 0 marks a combination with no defined values.
struct SummaryRow {
  std::string scope;
  std::string train_context;
  std::string metric;
  BoxplotSummary box;
};

std::vector<SummaryRow> summarize_deployment(
    const std::vector<DeploymentCell>& local_cells,
    const std::vector<DeploymentCell>& global_cells);

}  // namespace fairshift
