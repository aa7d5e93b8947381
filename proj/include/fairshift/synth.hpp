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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fairshift/dataset.hpp"
#include "fairshift/schema.hpp"

namespace fairshift {

struct GroupClassMeans {
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;
};

// Multi-context generator: per (group, class), features are Gaussian with
// diagonal covariance; context c adds shift_schedule[c] to every feature
// mean of the shifted groups. Categorical features come from extra latent
// Gaussians cut at fixed points, so covariate shift reaches the one-hot
// paths too. Mean vectors cover numeric features first, then the latents.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t rows_per_context = 1000;
  std::size_t numeric_features = 3;
  std::size_t categorical_features = 0;
  std::size_t categorical_levels = 3;
  std::array<double, kGroupCount> group_proportions{0.6, 0.25, 0.15};
  std::array<double, kGroupCount> base_rates{0.4, 0.4, 0.4};
  std::array<GroupClassMeans, kGroupCount> class_means;  // defaulted by validate
  Eigen::VectorXd variances;                             // defaulted to ones
  std::vector<double> shift_schedule;  // one entry per context
  std::vector<std::string> context_ids;  // defaulted to C00, C01, ...
  std::map<std::string, std::array<double, kGroupCount>>
      context_group_proportions;  // per-context overrides
  std::array<bool, kGroupCount> shifted_groups{true, true, true};

  std::size_t feature_count() const {
    return numeric_features + categorical_features;
  }
  std::size_t context_count() const { return shift_schedule.size(); }

  static SynthSpec from_json(const nlohmann::json& j);
  static SynthSpec load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Fills defaults (mean vectors, variances, context ids) and checks the
  // invariants: proportions sum to 1, variances > 0, base rates in (0,1).
  void finalize();  // ConfigError
};

// Ingestion schema matching generated contexts: numeric features x0..,
// categorical c0.., label column "outcome" (positive above 0.5), group
// column "group" with identity recode.
Schema synth_schema(const SynthSpec& spec);

// Deterministic per spec and seed; contexts draw from independent
// context-derived streams.
ContextCollection generate_collection(const SynthSpec& spec);

// Emit every generated context as <id>.csv under dir, in the format
// synth_schema ingests.
void emit_collection_csv(const ContextCollection& coll, const SynthSpec& spec,
                         const std::filesystem::path& dir);

}  // namespace fairshift
