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

#include "fairshift/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairshift/csv.hpp"
#include "fairshift/errors.hpp"
#include "fairshift/hash.hpp"
#include "fairshift/metrics.hpp"
#include "fairshift/version.hpp"

namespace fairshift {
namespace {

using nlohmann::json;

// The built-in default exclusion from pooled training and pooled stats:
// the one territory the census corpus ships that the national dataset does
// not cover. Dropped silently when no such context exists.
const std::set<std::string> kDefaultExclude = {"PR"};

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("invalid JSON in " + path.string());
  return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

// Fields every artifact carries so any file can be traced to its run.
struct RunMeta {
  std::uint64_t seed = 0;
  std::string hash;

  std::vector<std::string> columns() const {
    return {"seed", "config_hash", "tool_version"};
  }
  std::vector<std::string> values() const {
    return {std::to_string(seed), hash, kToolVersion};
  }
};

void append_meta(std::vector<std::string>& row, const RunMeta& meta) {
  for (auto& v : meta.values()) row.push_back(std::move(v));
}

RunMeta make_meta(const AuditData& data, const RunConfig& cfg,
                  const std::string& command) {
  json canonical{{"command", command},
                 {"config", cfg.to_json()},
                 {"schema", data.schema.to_json()},
                 {"source", data.source}};
  return RunMeta{cfg.experiment.seed, config_hash(canonical)};
}

// Exclusions the pooled operations actually apply: defaulted entries that
// name no context are dropped, explicit ones must exist.
std::set<std::string> resolve_exclusions(const RunConfig& cfg,
                                         const ContextCollection& coll) {
  std::set<std::string> out;
  for (const auto& id : cfg.experiment.global_exclude) {
    if (coll.contains(id)) {
      out.insert(id);
    } else if (!cfg.exclude_is_default) {
      throw ConfigError("excluded context \"" + id +
                        "\" is not in the collection");
    }
  }
  return out;
}

std::string metric_or_empty(const MetricMean& m) {
  return m.defined_folds > 0 ? format_double(m.value) : std::string();
}

std::vector<std::string> cells_header(const RunMeta& meta) {
  std::vector<std::string> h = {"model", "train_context", "deploy_context",
                                "folds"};
  for (const char* name : kMetricNames) {
    h.emplace_back(name);
    h.emplace_back(std::string(name) + "_folds");
  }
  for (auto& c : meta.columns()) h.push_back(std::move(c));
  return h;
}

std::vector<std::string> cell_row(const DeploymentCell& cell,
                                  const std::string& model,
                                  const RunMeta& meta) {
  std::vector<std::string> row = {model, cell.train_context,
                                  cell.deploy_context,
                                  std::to_string(cell.scores.folds)};
  for (const auto& m : cell.scores.metrics) {
    row.push_back(metric_or_empty(m));
    row.push_back(std::to_string(m.defined_folds));
  }
  append_meta(row, meta);
  return row;
}

std::vector<std::string> summary_row(const SummaryRow& s,
                                     const std::string& model,
                                     const RunMeta& meta) {
  std::vector<std::string> row = {model, s.scope, s.train_context, s.metric,
                                  std::to_string(s.box.n)};
  if (s.box.n == 0) {
    row.insert(row.end(), 7, std::string());
    row.emplace_back("0");
    row.emplace_back();
  } else {
    for (double v : {s.box.median, s.box.q1, s.box.q3, s.box.whisker_lo,
                     s.box.whisker_hi, s.box.min, s.box.max}) {
      row.push_back(format_double(v));
    }
    row.push_back(std::to_string(s.box.outliers.size()));
    std::string joined;
    for (std::size_t i = 0; i < s.box.outliers.size(); ++i) {
      if (i > 0) joined += ';';
      joined += format_double(s.box.outliers[i]);
    }
    row.push_back(std::move(joined));
  }
  append_meta(row, meta);
  return row;
}

std::vector<std::string> stats_row(const GroupStats& st, const RunMeta& meta) {
  std::vector<std::string> row = {st.context,
                                  std::to_string(st.raw_rows),
                                  std::to_string(st.rows),
                                  std::to_string(st.dropped_missing),
                                  std::to_string(st.group_counts[0]),
                                  std::to_string(st.group_counts[1]),
                                  std::to_string(st.group_counts[2]),
                                  format_double(st.group_rates[0]),
                                  format_double(st.group_rates[1]),
                                  format_double(st.group_rates[2]),
                                  std::to_string(st.positives),
                                  std::to_string(st.negatives),
                                  st.ir_infinite ? std::string()
                                                 : format_double(st.ir),
                                  st.ir_label()};
  append_meta(row, meta);
  return row;
}

// The context most like the paper's national dataset: the designated global
// member when one exists, otherwise the pool of the non-excluded locals.
Dataset pooled_dataset(const ContextCollection& coll,
                       const std::set<std::string>& exclude) {
  if (coll.global_id()) return coll.at(*coll.global_id());
  return build_global(coll, exclude);
}

double parse_double_field(const std::string& s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("cannot parse numeric field \"" + s + "\"");
  }
  return value;
}

// Eq.Odds of the globally trained model on each deployment context, read
// back from a prior matrix run's cells.csv in the same output directory.
std::map<std::string, double> global_eqodds_by_context(
    const std::filesystem::path& cells_path) {
  if (!std::filesystem::exists(cells_path)) {
    throw DataError("scatter needs " + cells_path.string() +
                    " from a prior matrix run into the same output "
                    "directory; rerun matrix first or disable the scatter");
  }
  CsvTable table = read_csv_file(cells_path);
  std::size_t train = table.column_index("train_context");
  std::size_t deploy = table.column_index("deploy_context");
  std::size_t eq = table.column_index("eqodds_wb");
  if (train == CsvTable::npos || deploy == CsvTable::npos ||
      eq == CsvTable::npos) {
    throw DataError(cells_path.string() +
                    " lacks the expected deployment cell columns");
  }
  std::map<std::string, double> by_context;
  for (const auto& row : table.rows) {
    if (row[train] != kGlobalTrainId || row[eq].empty()) continue;
    by_context[row[deploy]] = parse_double_field(row[eq]);
  }
  return by_context;
}

enum class FieldType { Str, Int, Real };

// Re-typed echo of one CSV artifact for the consolidated report. Columns
// not listed stay strings; empty cells become nulls.
json csv_as_json(const CsvTable& table,
                 const std::map<std::string, FieldType>& types) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const std::string& name = table.header[c];
      const std::string& value = row[c];
      auto it = types.find(name);
      FieldType type = it == types.end() ? FieldType::Str : it->second;
      if (value.empty() && type != FieldType::Str) {
        obj[name] = nullptr;
      } else if (type == FieldType::Int) {
        obj[name] = static_cast<std::int64_t>(parse_double_field(value));
      } else if (type == FieldType::Real) {
        obj[name] = parse_double_field(value);
      } else {
        obj[name] = value;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

json warnings_json(const std::vector<ContextWarning>& skipped,
                   const std::string& phase) {
  json arr = json::array();
  for (const auto& w : skipped) {
    arr.push_back(
        {{"phase", phase}, {"context", w.context}, {"message", w.message}});
  }
  return arr;
}

}  // namespace

AuditData load_audit_dir(
    const std::filesystem::path& data_dir,
    const std::optional<std::filesystem::path>& schema_path) {
  AuditData data;
  data.schema =
      schema_path ? Schema::load(*schema_path) : Schema::default_income();
  data.contexts = load_collection(data_dir, data.schema);
  data.source = {{"kind", "directory"},
                 {"path", data_dir.string()},
                 {"schema", schema_path ? schema_path->string()
                                        : std::string("default")}};
  return data;
}

AuditData load_audit_synth(const SynthSpec& spec) {
  SynthSpec resolved = spec;
  resolved.finalize();
  AuditData data;
  data.schema = synth_schema(resolved);
  data.contexts = generate_collection(resolved);
  data.source = {{"kind", "synthetic"}, {"spec", resolved.to_json()}};
  return data;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown_keys(j,
                      {"model", "folds", "seed", "trainer", "global_exclude",
                       "global_row_cap", "estimator", "scatter", "jobs"},
                      "run config");
  RunConfig cfg;
  try {
    if (j.contains("model")) {
      cfg.experiment.model = model_kind_from_string(j.at("model"));
    }
    if (j.contains("folds")) cfg.experiment.folds = j.at("folds").get<int>();
    if (j.contains("seed")) {
      cfg.experiment.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("trainer")) {
      const json& t = j.at("trainer");
      reject_unknown_keys(
          t, {"lambda", "eta", "max_iterations", "grad_tolerance"},
          "trainer config");
      TrainerConfig& tc = cfg.experiment.trainer;
      if (t.contains("lambda")) tc.lambda = t.at("lambda").get<double>();
      if (t.contains("eta")) tc.eta = t.at("eta").get<double>();
      if (t.contains("max_iterations")) {
        tc.max_iterations = t.at("max_iterations").get<int>();
      }
      if (t.contains("grad_tolerance")) {
        tc.grad_tolerance = t.at("grad_tolerance").get<double>();
      }
    }
    if (j.contains("global_exclude")) {
      cfg.experiment.global_exclude =
          j.at("global_exclude").get<std::set<std::string>>();
      cfg.exclude_is_default = false;
    } else {
      cfg.experiment.global_exclude = kDefaultExclude;
    }
    if (j.contains("global_row_cap")) {
      cfg.experiment.global_row_cap =
          j.at("global_row_cap").get<std::size_t>();
    }
    if (j.contains("estimator")) {
      cfg.estimator = estimator_from_string(j.at("estimator"));
    }
    if (j.contains("scatter")) cfg.scatter = j.at("scatter").get<bool>();
    if (j.contains("jobs")) cfg.experiment.jobs = j.at("jobs").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid run config: ") + e.what());
  }
  return cfg;
}

json RunConfig::to_json() const {
  // Execution details that cannot change artifact bytes (worker count) are
  // deliberately left out, so they cannot change the config hash either.
  return json{{"model", to_string(experiment.model)},
              {"folds", experiment.folds},
              {"seed", experiment.seed},
              {"trainer",
               {{"lambda", experiment.trainer.lambda},
                {"eta", experiment.trainer.eta},
                {"max_iterations", experiment.trainer.max_iterations},
                {"grad_tolerance", experiment.trainer.grad_tolerance}}},
              {"global_exclude", experiment.global_exclude},
              {"global_row_cap", experiment.global_row_cap},
              {"estimator", to_string(estimator)},
              {"scatter", scatter}};
}

std::string config_hash(const json& canonical) {
  return hex64(fnv1a64(canonical.dump()));
}

void cmd_stats(const AuditData& data, const RunConfig& cfg,
               const std::filesystem::path& out_dir) {
  cfg.experiment.validate();
  auto exclude = resolve_exclusions(cfg, data.contexts);
  RunMeta meta = make_meta(data, cfg, "stats");

  std::vector<std::string> header = {
      "context", "raw_rows", "rows",     "dropped_missing",
      "w_count", "b_count",  "o_count",  "w_rate",
      "b_rate",  "o_rate",   "positives", "negatives",
      "ir",      "ir_label"};
  for (auto& c : meta.columns()) header.push_back(std::move(c));

  std::vector<std::vector<std::string>> rows;
  for (const auto& [id, ds] : data.contexts.members()) {
    rows.push_back(stats_row(compute_group_stats(ds), meta));
  }
  if (!data.contexts.global_id()) {
    GroupStats pooled = compute_group_stats(pooled_dataset(data.contexts,
                                                           exclude));
    rows.push_back(stats_row(pooled, meta));
  }

  std::filesystem::create_directories(out_dir);
  write_csv_file(out_dir / "stats.csv", header, rows);
}

int cmd_matrix(const AuditData& data, const RunConfig& cfg,
               const std::filesystem::path& out_dir) {
  RunConfig resolved = cfg;
  resolved.experiment.global_exclude = resolve_exclusions(cfg, data.contexts);
  resolved.experiment.trainer.seed = resolved.experiment.seed;
  resolved.experiment.validate();

  RunMeta meta = make_meta(data, cfg, "matrix");
  const std::string model = to_string(cfg.experiment.model);

  DeploymentResult local =
      run_local_models(data.contexts, data.schema, resolved.experiment);
  DeploymentResult global =
      run_global_model(data.contexts, data.schema, resolved.experiment);

  std::vector<std::vector<std::string>> cell_rows;
  for (const auto& c : local.cells) cell_rows.push_back(cell_row(c, model, meta));
  for (const auto& c : global.cells) cell_rows.push_back(cell_row(c, model, meta));

  std::vector<std::string> sum_header = {
      "model",      "scope", "train_context", "metric",     "n",
      "median",     "q1",    "q3",            "whisker_lo", "whisker_hi",
      "min",        "max",   "n_outliers",    "outliers"};
  for (auto& c : meta.columns()) sum_header.push_back(std::move(c));
  std::vector<std::vector<std::string>> sum_rows;
  for (const auto& s : summarize_deployment(local.cells, global.cells)) {
    sum_rows.push_back(summary_row(s, model, meta));
  }

  json run{{"command", "matrix"},
           {"tool_version", kToolVersion},
           {"seed", cfg.experiment.seed},
           {"config_hash", meta.hash},
           {"config", cfg.to_json()},
           {"schema", data.schema.to_json()},
           {"source", data.source},
           {"contexts", data.contexts.ids()},
           {"global_id", data.contexts.global_id()
                             ? json(*data.contexts.global_id())
                             : json(nullptr)},
           {"effective_global_exclude", resolved.experiment.global_exclude},
           {"cells", {{"local", local.cells.size()},
                      {"global", global.cells.size()}}}};
  json skipped = warnings_json(local.skipped, "local");
  for (auto& w : warnings_json(global.skipped, "global")) {
    skipped.push_back(std::move(w));
  }
  run["skipped"] = skipped;
  int exit_code = skipped.empty() ? 0 : 3;
  run["exit_code"] = exit_code;

  std::filesystem::create_directories(out_dir);
  write_csv_file(out_dir / "cells.csv", cells_header(meta), cell_rows);
  write_csv_file(out_dir / "summary.csv", sum_header, sum_rows);
  write_json_file(out_dir / "run.json", run);
  return exit_code;
}

void cmd_mmd(const AuditData& data, const RunConfig& cfg,
             const std::filesystem::path& out_dir) {
  cfg.experiment.validate();
  auto exclude = resolve_exclusions(cfg, data.contexts);
  RunMeta meta = make_meta(data, cfg, "mmd");

  MmdMatrix matrix = pairwise_mmd(data.contexts, data.schema, cfg.estimator);
  const std::size_t n = matrix.ids.size();

  std::vector<std::string> mat_header = {"context"};
  mat_header.insert(mat_header.end(), matrix.ids.begin(), matrix.ids.end());
  for (auto& c : meta.columns()) mat_header.push_back(std::move(c));
  auto matrix_rows = [&](const Eigen::MatrixXd& values) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> row = {matrix.ids[i]};
      for (std::size_t j = 0; j < n; ++j) {
        row.push_back(format_double(values(i, j)));
      }
      append_meta(row, meta);
      rows.push_back(std::move(row));
    }
    return rows;
  };

  std::vector<std::string> sums_header = {"context", "rowsum_normalized",
                                          "rowsum_raw"};
  for (auto& c : meta.columns()) sums_header.push_back(std::move(c));
  std::vector<std::vector<std::string>> sums_rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row = {
        matrix.ids[i], format_double(matrix.row_sums_normalized[i]),
        format_double(matrix.row_sums_raw[i])};
    append_meta(row, meta);
    sums_rows.push_back(std::move(row));
  }

  json mmd_meta{{"command", "mmd"},
                {"tool_version", kToolVersion},
                {"seed", cfg.experiment.seed},
                {"config_hash", meta.hash},
                {"estimator", to_string(matrix.estimator)},
                {"kernel", "linear"},
                {"contexts", matrix.ids},
                {"scatter", cfg.scatter}};

  std::filesystem::create_directories(out_dir);

  if (cfg.scatter) {
    auto eqodds = global_eqodds_by_context(out_dir / "cells.csv");
    GlobalLocalMmd gl = global_local_mmd(pooled_dataset(data.contexts,
                                                        exclude),
                                         data.contexts, data.schema,
                                         cfg.estimator);
    std::vector<std::string> header = {"context", "mmd", "ir", "eq_odds"};
    for (auto& c : meta.columns()) header.push_back(std::move(c));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < gl.ids.size(); ++i) {
      GroupStats st = compute_group_stats(data.contexts.at(gl.ids[i]));
      auto eq = eqodds.find(gl.ids[i]);
      std::vector<std::string> row = {
          gl.ids[i], format_double(gl.normalized[i]),
          st.ir_infinite ? std::string() : format_double(st.ir),
          eq == eqodds.end() ? std::string() : format_double(eq->second)};
      append_meta(row, meta);
      rows.push_back(std::move(row));
    }
    write_csv_file(out_dir / "scatter.csv", header, rows);
    mmd_meta["global_local"] = {{"contexts", gl.ids},
                                {"raw", gl.raw},
                                {"normalized", gl.normalized},
                                {"pooled_source",
                                 data.contexts.global_id()
                                     ? json(*data.contexts.global_id())
                                     : json("pooled_locals")}};
  }

  write_csv_file(out_dir / "matrix.csv", mat_header, matrix_rows(matrix.raw));
  write_csv_file(out_dir / "matrix_normalized.csv", mat_header,
                 matrix_rows(matrix.normalized));
  write_csv_file(out_dir / "rowsums.csv", sums_header, sums_rows);
  write_json_file(out_dir / "mmd.json", mmd_meta);
}

void cmd_report(const std::filesystem::path& out_dir) {
  const std::vector<std::string> required = {"run.json", "stats.csv",
                                             "cells.csv", "summary.csv"};
  std::string missing;
  for (const auto& name : required) {
    if (!std::filesystem::exists(out_dir / name)) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  }
  if (!missing.empty()) {
    throw DataError("report needs prior artifacts in " + out_dir.string() +
                    "; missing: " + missing);
  }

  std::map<std::string, FieldType> stats_types = {
      {"raw_rows", FieldType::Int},  {"rows", FieldType::Int},
      {"dropped_missing", FieldType::Int}, {"w_count", FieldType::Int},
      {"b_count", FieldType::Int},   {"o_count", FieldType::Int},
      {"w_rate", FieldType::Real},   {"b_rate", FieldType::Real},
      {"o_rate", FieldType::Real},   {"positives", FieldType::Int},
      {"negatives", FieldType::Int}, {"ir", FieldType::Real},
      {"seed", FieldType::Int}};
  std::map<std::string, FieldType> cell_types = {
      {"folds", FieldType::Int}, {"seed", FieldType::Int}};
  for (const char* name : kMetricNames) {
    cell_types[name] = FieldType::Real;
    cell_types[std::string(name) + "_folds"] = FieldType::Int;
  }
  std::map<std::string, FieldType> summary_types = {
      {"n", FieldType::Int},          {"median", FieldType::Real},
      {"q1", FieldType::Real},        {"q3", FieldType::Real},
      {"whisker_lo", FieldType::Real}, {"whisker_hi", FieldType::Real},
      {"min", FieldType::Real},       {"max", FieldType::Real},
      {"n_outliers", FieldType::Int}, {"seed", FieldType::Int}};
  std::map<std::string, FieldType> scatter_types = {
      {"mmd", FieldType::Real},
      {"ir", FieldType::Real},
      {"eq_odds", FieldType::Real},
      {"seed", FieldType::Int}};
  std::map<std::string, FieldType> sums_types = {
      {"rowsum_normalized", FieldType::Real},
      {"rowsum_raw", FieldType::Real},
      {"seed", FieldType::Int}};

  json run = read_json_file(out_dir / "run.json");
  json report{{"tool_version", kToolVersion},
              {"seed", run.value("seed", json())},
              {"config_hash", run.value("config_hash", json())},
              {"run", run},
              {"stats", csv_as_json(read_csv_file(out_dir / "stats.csv"),
                                    stats_types)},
              {"cells", csv_as_json(read_csv_file(out_dir / "cells.csv"),
                                    cell_types)},
              {"summary", csv_as_json(read_csv_file(out_dir / "summary.csv"),
                                      summary_types)}};

  if (std::filesystem::exists(out_dir / "mmd.json")) {
    json mmd = read_json_file(out_dir / "mmd.json");
    if (std::filesystem::exists(out_dir / "rowsums.csv")) {
      mmd["row_sums"] = csv_as_json(read_csv_file(out_dir / "rowsums.csv"),
                                    sums_types);
    }
    report["mmd"] = mmd;
  }
  if (std::filesystem::exists(out_dir / "scatter.csv")) {
    report["scatter"] = csv_as_json(read_csv_file(out_dir / "scatter.csv"),
                                    scatter_types);
  }

  write_json_file(out_dir / "report.json", report);
}

}  // namespace fairshift
