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

// Command-line front end. Every operation goes through the shared C API;
// this translation unit only parses flags and assembles the run config.

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairshift/capi.h"

namespace {

using nlohmann::json;

struct CliOptions {
  std::string data_dir;
  std::string synth_spec;
  std::string schema;
  std::string out;

  std::string model = "vanilla";
  int folds = 10;
  std::uint64_t seed = 0;
  std::string estimator = "biased";
  int jobs = 1;
  std::uint64_t row_cap = 0;
  double lambda = 1.0;
  double eta = 1.0;
  int max_iter = 500;
  double tol = 1e-6;
  std::vector<std::string> exclude_global;
  bool no_scatter = false;
};

// Run config JSON with only the keys the user actually set, so defaults
// stay defined in one place inside the library.
json build_run_config(const CLI::App* cmd, const CliOptions& opt) {
  json cfg = json::object();
  auto given = [&](const std::string& flag) {
    const CLI::Option* o = cmd->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  if (given("--model")) cfg["model"] = opt.model;
  if (given("--folds")) cfg["folds"] = opt.folds;
  if (given("--seed")) cfg["seed"] = opt.seed;
  if (given("--estimator")) cfg["estimator"] = opt.estimator;
  if (given("--jobs")) cfg["jobs"] = opt.jobs;
  if (given("--row-cap")) cfg["global_row_cap"] = opt.row_cap;
  if (given("--exclude-global")) cfg["global_exclude"] = opt.exclude_global;
  if (given("--no-scatter")) cfg["scatter"] = !opt.no_scatter;
  json trainer = json::object();
  if (given("--lambda")) trainer["lambda"] = opt.lambda;
  if (given("--eta")) trainer["eta"] = opt.eta;
  if (given("--max-iter")) trainer["max_iterations"] = opt.max_iter;
  if (given("--tol")) trainer["grad_tolerance"] = opt.tol;
  if (!trainer.empty()) cfg["trainer"] = trainer;
  return cfg;
}

using CollectionPtr =
    std::unique_ptr<fairshift_collection,
                    decltype(&fairshift_collection_close)>;

int report_failure(fairshift_status status) {
  std::fprintf(stderr, "error: %s\n", fairshift_last_error());
  return static_cast<int>(status);
}

// Opens the input named by exactly one of --data-dir / --synth-spec.
int open_input(const CliOptions& opt, CollectionPtr& coll) {
  if (opt.data_dir.empty() == opt.synth_spec.empty()) {
    std::fprintf(stderr,
                 "error: exactly one of --data-dir and --synth-spec is "
                 "required\n");
    return static_cast<int>(FAIRSHIFT_ERROR_CONFIG);
  }
  fairshift_collection* raw = nullptr;
  fairshift_status status;
  if (!opt.data_dir.empty()) {
    status = fairshift_collection_open_dir(
        opt.data_dir.c_str(),
        opt.schema.empty() ? nullptr : opt.schema.c_str(), &raw);
  } else {
    status = fairshift_collection_from_synth_file(opt.synth_spec.c_str(),
                                                  &raw);
  }
  if (status != FAIRSHIFT_OK) return report_failure(status);
  coll.reset(raw);
  return 0;
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ok = in.good() || in.eof();
  return buf.str();
}

void add_input_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--data-dir", opt.data_dir,
                  "Directory of per-context CSV files");
  cmd->add_option("--synth-spec", opt.synth_spec,
                  "Synthetic generator spec (JSON file)");
  cmd->add_option("--schema", opt.schema,
                  "Task schema JSON (default: built-in census income task)");
}

void add_experiment_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--model", opt.model, "Classifier: vanilla or fair")
      ->check(CLI::IsMember({"vanilla", "fair"}));
  cmd->add_option("--folds", opt.folds, "Cross-validation folds (>= 2)");
  cmd->add_option("--jobs", opt.jobs, "Worker threads");
  cmd->add_option("--row-cap", opt.row_cap,
                  "Cap on pooled global training rows (0 = no cap)");
  cmd->add_option("--lambda", opt.lambda, "L2 regularization strength");
  cmd->add_option("--eta", opt.eta, "Prejudice-regularizer strength");
  cmd->add_option("--max-iter", opt.max_iter, "Optimizer iteration cap");
  cmd->add_option("--tol", opt.tol, "Optimizer gradient tolerance");
  cmd->add_option("--exclude-global", opt.exclude_global,
                  "Context ids kept out of pooled training (default: PR)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Audits how classifier accuracy and group fairness degrade when "
      "models trained in one spatial context are deployed in another."};
  app.require_subcommand(1);
  app.set_version_flag("--version", fairshift_version());

  CliOptions opt;

  CLI::App* stats = app.add_subcommand(
      "stats", "Per-context sample and group composition stats");
  add_input_flags(stats, opt);
  stats->add_option("--seed", opt.seed, "Seed recorded in artifacts");
  stats->add_option("--exclude-global", opt.exclude_global,
                    "Context ids kept out of the pooled row (default: PR)");
  stats->add_option("--out", opt.out, "Output directory")->required();

  CLI::App* matrix = app.add_subcommand(
      "matrix", "Local and global deployment experiments");
  add_input_flags(matrix, opt);
  add_experiment_flags(matrix, opt);
  matrix->add_option("--seed", opt.seed, "Experiment seed");
  matrix->add_option("--out", opt.out, "Output directory")->required();

  CLI::App* mmd = app.add_subcommand(
      "mmd", "Pairwise context similarity and the shift-vs-fairness scatter");
  add_input_flags(mmd, opt);
  mmd->add_option("--seed", opt.seed, "Seed recorded in artifacts");
  mmd->add_option("--estimator", opt.estimator,
                  "Squared-MMD estimator: biased or unbiased")
      ->check(CLI::IsMember({"biased", "unbiased"}));
  mmd->add_option("--exclude-global", opt.exclude_global,
                  "Context ids kept out of the pooled side (default: PR)");
  mmd->add_flag("--no-scatter", opt.no_scatter,
                "Skip scatter.csv (no prior matrix run needed)");
  mmd->add_option("--out", opt.out, "Output directory")->required();

  CLI::App* report = app.add_subcommand(
      "report", "Consolidate prior artifacts into report.json");
  report->add_option("--out", opt.out,
                     "Directory holding the artifacts to consolidate")
      ->required();

  CLI::App* synth = app.add_subcommand(
      "synth", "Write a synthetic collection as per-context CSV files");
  synth->add_option("--synth-spec", opt.synth_spec,
                    "Synthetic generator spec (JSON file)")
      ->required();
  synth->add_option("--out", opt.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(FAIRSHIFT_ERROR_CONFIG);
  }

  if (report->parsed()) {
    fairshift_status status = fairshift_write_report(opt.out.c_str());
    return status == FAIRSHIFT_OK ? 0 : report_failure(status);
  }

  if (synth->parsed()) {
    bool ok = true;
    std::string spec = read_file(opt.synth_spec, ok);
    if (!ok) {
      std::fprintf(stderr, "error: cannot read %s\n",
                   opt.synth_spec.c_str());
      return static_cast<int>(FAIRSHIFT_ERROR_DATA);
    }
    fairshift_status status =
        fairshift_emit_synth_csv(spec.c_str(), opt.out.c_str());
    return status == FAIRSHIFT_OK ? 0 : report_failure(status);
  }

  CollectionPtr coll(nullptr, &fairshift_collection_close);
  if (int code = open_input(opt, coll)) return code;

  CLI::App* cmd = stats->parsed() ? stats : matrix->parsed() ? matrix : mmd;
  std::string cfg = build_run_config(cmd, opt).dump();

  fairshift_status status;
  if (stats->parsed()) {
    status = fairshift_run_stats(coll.get(), cfg.c_str(), opt.out.c_str());
  } else if (matrix->parsed()) {
    status = fairshift_run_matrix(coll.get(), cfg.c_str(), opt.out.c_str());
  } else {
    status = fairshift_run_mmd(coll.get(), cfg.c_str(), opt.out.c_str());
  }
  return status == FAIRSHIFT_OK ? 0 : report_failure(status);
}
