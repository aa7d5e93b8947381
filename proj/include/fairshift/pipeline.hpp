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

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fairshift/dataset.hpp"
#include "fairshift/harness.hpp"
#include "fairshift/mmd.hpp"
#include "fairshift/schema.hpp"
#include "fairshift/synth.hpp"

namespace fairshift {

// Everything a run operates on: the task schema, the per-context datasets,
// and a provenance echo for run metadata (no timestamps; artifacts must be
// byte-reproducible).
struct AuditData {
  Schema schema;
  ContextCollection contexts;
  nlohmann::json source;
};

AuditData load_audit_dir(const std::filesystem::path& data_dir,
                         const std::optional<std::filesystem::path>& schema_path);
AuditData load_audit_synth(const SynthSpec& spec);

struct RunConfig {
  ExperimentConfig experiment;
  MmdEstimator estimator = MmdEstimator::Biased;
  // cmd_mmd: also emit the per-context scatter of global-local MMD against
  // IR and the deployed global model's Eq.Odds; needs a prior cmd_matrix
  // run in the same output directory.
  bool scatter = true;
  // True while global_exclude holds the built-in default rather than an
  // explicit choice; a defaulted exclusion naming no actual context is
  // dropped instead of rejected.
  bool exclude_is_default = true;

  static RunConfig from_json(const nlohmann::json& j);  // ConfigError
  nlohmann::json to_json() const;
};

// FNV-1a hash of the canonical JSON serialization, as a 16-digit hex string.
std::string config_hash(const nlohmann::json& canonical);

// Per-context and pooled composition stats -> stats.csv.
void cmd_stats(const AuditData& data, const RunConfig& cfg,
               const std::filesystem::path& out_dir);

// Local and global deployment experiments -> cells.csv, summary.csv,
// run.json. Returns 0, or 3 when any context was skipped (partial run).
int cmd_matrix(const AuditData& data, const RunConfig& cfg,
               const std::filesystem::path& out_dir);

// Pairwise context similarity -> matrix.csv, matrix_normalized.csv,
// rowsums.csv, mmd.json, and (unless disabled) scatter.csv.
void cmd_mmd(const AuditData& data, const RunConfig& cfg,
             const std::filesystem::path& out_dir);

// Consolidate prior artifacts in out_dir into report.json.
void cmd_report(const std::filesystem::path& out_dir);

}  // namespace fairshift
