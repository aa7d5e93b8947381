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

#include "fairshift/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "fairshift/encode.hpp"
#include "fairshift/errors.hpp"
#include "fairshift/hash.hpp"

namespace fairshift {

namespace {

// Fisher-Yates with explicit index draws, so the permutation depends only
// on the (standardized) mt19937_64 stream, not on library shuffle details.
void deterministic_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// Runs fn(0..count-1) over a fixed-slot result layout; worker timing can
// not affect outputs. Exceptions propagate after all workers finish.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct FoldModel {
  EncoderSpec encoder;
  ModelParams params;
};

// The encoder is fitted on exactly the rows the model trains on, so no
// statistic of held-out or deployment rows leaks into training.
FoldModel fit_fold_model(const Dataset& train, const Schema& schema,
                         const ExperimentConfig& cfg) {
  FoldModel fm;
  fm.encoder = fit_encoder(train, schema);
  const EncodedMatrix X = transform(fm.encoder, train);
  if (cfg.model == ModelKind::Fair) {
    const SampleWeights w = compute_reweighing_weights(train);
    fm.params =
        train_prejudice_remover(X, train.labels, train.groups, w, cfg.trainer);
  } else {
    fm.params = train_vanilla(X, train.labels, train.weights, cfg.trainer);
  }
  return fm;
}

std::vector<FoldModel> fit_fold_models(const Dataset& ds, const Schema& schema,
                                       const ExperimentConfig& cfg,
                                       std::uint64_t fold_seed) {
  const auto folds = stratified_kfold(ds.labels, cfg.folds, fold_seed);
  std::vector<FoldModel> models;
  models.reserve(folds.size());
  std::vector<char> held(ds.size());
  for (std::size_t j = 0; j < folds.size(); ++j) {
    std::fill(held.begin(), held.end(), 0);
    for (const std::size_t r : folds[j]) held[r] = 1;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(ds.size() - folds[j].size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (!held[r]) train_rows.push_back(r);
    }
    try {
      models.push_back(fit_fold_model(ds.subset(train_rows), schema, cfg));
    } catch (const Error& e) {
      throw TrainingError("fold " + std::to_string(j) + ": " + e.what());
    }
  }
  return models;
}

class ScoreAccumulator {
 public:
  void add(const FairnessScores& s) {
    const auto arr = s.as_array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (arr[i].defined) {
        sum_[i] += arr[i].value;
        ++count_[i];
      }
    }
    ++folds_;
  }

  ScoreSummary summary() const {
    ScoreSummary out;
    out.folds = folds_;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      out.metrics[i].defined_folds = count_[i];
      if (count_[i] > 0) out.metrics[i].value = sum_[i] / count_[i];
    }
    return out;
  }

 private:
  std::array<double, 7> sum_{};
  std::array<int, 7> count_{};
  int folds_ = 0;
};

FairnessScores score_deployment(const FoldModel& fm, const Dataset& deploy) {
  const EncodedMatrix X = transform(fm.encoder, deploy);
  const Predictions pred = predict(fm.params, X, deploy.groups);
  return score_predictions(deploy.labels, pred.label, deploy.groups);
}

double interpolated_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

const char* to_string(ModelKind kind) {
  return kind == ModelKind::Vanilla ? "vanilla" : "fair";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "vanilla") return ModelKind::Vanilla;
  if (s == "fair") return ModelKind::Fair;
  throw ConfigError("unknown model kind: \"" + s +
                    "\" (expected \"vanilla\" or \"fair\")");
}

void ExperimentConfig::validate() const {
  if (folds < 2) throw ConfigError("fold count must be >= 2");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  trainer.validate();
}

std::vector<std::vector<std::size_t>> stratified_kfold(
    const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be >= 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i] ? 1 : 0].push_back(i);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(by_class[c].size()) +
                      " rows, fewer than " + std::to_string(k) + " folds");
    }
  }

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < 2; ++c) {
    deterministic_shuffle(by_class[c],
                          derive_seed(seed, c == 0 ? "class:0" : "class:1"));
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      folds[i % static_cast<std::size_t>(k)].push_back(by_class[c][i]);
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

Dataset stratified_subsample(const Dataset& ds, std::size_t cap,
                             std::uint64_t seed) {
  if (cap == 0 || ds.size() <= cap) return ds;

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[ds.labels[i] ? 1 : 0].push_back(i);
  }

  const auto total = static_cast<double>(ds.size());
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    if (by_class[c].empty()) continue;
    const double exact =
        static_cast<double>(cap) * static_cast<double>(by_class[c].size()) /
        total;
    take[c] = std::max<std::size_t>(1, static_cast<std::size_t>(exact));
    take[c] = std::min(take[c], by_class[c].size());
    remainder[c] = exact - static_cast<double>(take[c]);
    assigned += take[c];
  }
  // Largest-remainder fill up to the cap.
  while (assigned < cap) {
    std::size_t best = 2;
    for (std::size_t c = 0; c < 2; ++c) {
      if (take[c] >= by_class[c].size()) continue;
      if (best == 2 || remainder[c] > remainder[best]) best = c;
    }
    if (best == 2) break;
    ++take[best];
    remainder[best] -= 1.0;
    ++assigned;
  }

  std::vector<std::size_t> keep;
  keep.reserve(assigned);
  for (std::size_t c = 0; c < 2; ++c) {
    deterministic_shuffle(by_class[c],
                          derive_seed(seed, c == 0 ? "sub:0" : "sub:1"));
    keep.insert(keep.end(), by_class[c].begin(),
                by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
  }
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

ScoreSummary run_in_distribution(const Dataset& ds, const Schema& schema,
                                 const ExperimentConfig& cfg) {
  cfg.validate();
  const auto folds = stratified_kfold(
      ds.labels, cfg.folds, derive_seed(cfg.seed, "indist:" + ds.context));
  ScoreAccumulator acc;
  std::vector<char> held(ds.size());
  for (std::size_t j = 0; j < folds.size(); ++j) {
    std::fill(held.begin(), held.end(), 0);
    for (const std::size_t r : folds[j]) held[r] = 1;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(ds.size() - folds[j].size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (!held[r]) train_rows.push_back(r);
    }
    FoldModel fm;
    try {
      fm = fit_fold_model(ds.subset(train_rows), schema, cfg);
    } catch (const Error& e) {
      throw TrainingError("fold " + std::to_string(j) + ": " + e.what());
    }
    acc.add(score_deployment(fm, ds.subset(folds[j])));
  }
  return acc.summary();
}

DeploymentResult run_local_models(const ContextCollection& coll,
                                  const Schema& schema,
                                  const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> ids = coll.local_ids();
  if (ids.size() < 2) {
    throw DataError("local experiment needs at least 2 contexts");
  }

  struct TaskResult {
    std::vector<DeploymentCell> cells;
    std::optional<ContextWarning> warning;
  };
  std::vector<TaskResult> results(ids.size());

  parallel_for(ids.size(), cfg.jobs, [&](std::size_t t) {
    const std::string& train_id = ids[t];
    std::vector<FoldModel> models;
    try {
      models = fit_fold_models(coll.at(train_id), schema, cfg,
                               derive_seed(cfg.seed, "local:" + train_id));
    } catch (const Error& e) {
      results[t].warning = ContextWarning{train_id, e.what()};
      return;
    }
    for (const std::string& deploy_id : ids) {
      if (deploy_id == train_id) continue;
      const Dataset& deploy = coll.at(deploy_id);
      ScoreAccumulator acc;
      for (const auto& fm : models) acc.add(score_deployment(fm, deploy));
      results[t].cells.push_back({train_id, deploy_id, acc.summary()});
    }
  });

  DeploymentResult out;
  for (auto& r : results) {
    for (auto& cell : r.cells) out.cells.push_back(std::move(cell));
    if (r.warning) out.skipped.push_back(std::move(*r.warning));
  }
  return out;
}

DeploymentResult run_global_model(const ContextCollection& coll,
                                  const Schema& schema,
                                  const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> ids = coll.local_ids();
  if (ids.empty()) throw DataError("collection has no local contexts");
  for (const auto& id : cfg.global_exclude) {
    if (!coll.contains(id)) {
      throw ConfigError("global exclusion references unknown context: " + id);
    }
  }

  struct TaskResult {
    std::optional<DeploymentCell> cell;
    std::optional<ContextWarning> warning;
  };
  std::vector<TaskResult> results(ids.size());

  parallel_for(ids.size(), cfg.jobs, [&](std::size_t t) {
    const std::string& deploy_id = ids[t];
    std::set<std::string> exclude = cfg.global_exclude;
    exclude.insert(deploy_id);
    try {
      Dataset pool = build_global(coll, exclude);
      if (cfg.global_row_cap > 0 && pool.size() > cfg.global_row_cap) {
        pool = stratified_subsample(pool, cfg.global_row_cap,
                                    derive_seed(cfg.seed, "cap:" + deploy_id));
      }
      const auto models =
          fit_fold_models(pool, schema, cfg,
                          derive_seed(cfg.seed, "global:" + deploy_id));
      const Dataset& deploy = coll.at(deploy_id);
      ScoreAccumulator acc;
      for (const auto& fm : models) acc.add(score_deployment(fm, deploy));
      results[t].cell = DeploymentCell{kGlobalTrainId, deploy_id, acc.summary()};
    } catch (const Error& e) {
      results[t].warning = ContextWarning{deploy_id, e.what()};
    }
  });

  DeploymentResult out;
  for (auto& r : results) {
    if (r.cell) out.cells.push_back(std::move(*r.cell));
    if (r.warning) out.skipped.push_back(std::move(*r.warning));
  }
  return out;
}

BoxplotSummary aggregate_boxplot(std::vector<double> values) {
  if (values.empty()) throw DataError("no defined values to aggregate");
  std::sort(values.begin(), values.end());

  BoxplotSummary box;
  box.n = values.size();
  box.min = values.front();
  box.max = values.back();
  box.q1 = interpolated_quantile(values, 0.25);
  box.median = interpolated_quantile(values, 0.5);
  box.q3 = interpolated_quantile(values, 0.75);

  const double iqr = box.q3 - box.q1;
  const double lo_fence = box.q1 - 1.5 * iqr;
  const double hi_fence = box.q3 + 1.5 * iqr;
  box.whisker_lo = box.q1;
  box.whisker_hi = box.q3;
  bool found = false;
  for (const double v : values) {
    if (v < lo_fence || v > hi_fence) {
      box.outliers.push_back(v);
    } else {
      if (!found) {
        box.whisker_lo = v;
        found = true;
      }
      box.whisker_hi = v;
    }
  }
  return box;
}

std::vector<SummaryRow> summarize_deployment(
    const std::vector<DeploymentCell>& local_cells,
    const std::vector<DeploymentCell>& global_cells) {
  std::vector<std::string> train_ids;
  for (const auto& cell : local_cells) {
    if (train_ids.empty() || train_ids.back() != cell.train_context) {
      train_ids.push_back(cell.train_context);
    }
  }

  std::vector<SummaryRow> rows;
  auto emit = [&rows](const std::string& scope, const std::string& ctx,
                      const char* metric, const std::vector<double>& values) {
    SummaryRow row;
    row.scope = scope;
    row.train_context = ctx;
    row.metric = metric;
    if (!values.empty()) row.box = aggregate_boxplot(values);
    rows.push_back(std::move(row));
  };

  for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
    std::vector<double> medians;
    for (const auto& train_id : train_ids) {
      std::vector<double> values;
      for (const auto& cell : local_cells) {
        if (cell.train_context != train_id) continue;
        const MetricMean& mm = cell.scores.metrics[m];
        if (mm.defined_folds > 0) values.push_back(mm.value);
      }
      emit("train_context", train_id, kMetricNames[m], values);
      if (!values.empty()) {
        medians.push_back(rows.back().box.median);
      }
    }
    emit("local_medians", "LOCAL", kMetricNames[m], medians);

    std::vector<double> global_values;
    for (const auto& cell : global_cells) {
      const MetricMean& mm = cell.scores.metrics[m];
      if (mm.defined_folds > 0) global_values.push_back(mm.value);
    }
    emit("global", kGlobalTrainId, kMetricNames[m], global_values);
  }
  return rows;
}

}  // namespace fairshift
