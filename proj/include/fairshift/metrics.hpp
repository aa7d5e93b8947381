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
#include <vector>

#include "fairshift/schema.hpp"

namespace fairshift {

struct ConfusionCell {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t positives() const { return tp + fn; }  // ground-truth positives
  std::size_t negatives() const { return fp + tn; }
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct GroupConfusion {
  std::array<ConfusionCell, kGroupCount> cells{};

  const ConfusionCell& of(Group g) const {
    return cells[static_cast<std::size_t>(g)];
  }
  std::size_t total() const;
};

GroupConfusion confusion_by_group(const std::vector<std::uint8_t>& y,
                                  const std::vector<std::uint8_t>& y_hat,
                                  const std::vector<Group>& g);

// A rate difference that may be undefined (a conditioning class is empty in
// one of the groups). Undefined is a first-class state, never reported as 0.
struct MetricValue {
  double value = 0.0;
  bool defined = false;
};

// |FNR_ref − FNR_other| with FNR_g = FN/(TP+FN): equal-opportunity gap.
// Undefined when either group has no ground-truth positives.
MetricValue delta_fnr(const GroupConfusion& conf, Group other,
                      Group reference = Group::W);

// |FPR_ref − FPR_other| with FPR_g = FP/(FP+TN): predictive-equality gap.
// Undefined when either group has no ground-truth negatives.
MetricValue delta_fpr(const GroupConfusion& conf, Group other,
                      Group reference = Group::W);

// |δFPR| + |δFNR| for one group pair; undefined when either part is.
MetricValue eq_odds(MetricValue dfpr, MetricValue dfnr);

// Predictive and fairness scores of one deployment, reference group W
// against each protected group.
struct FairnessScores {
  MetricValue accuracy;  // undefined only on empty input
  MetricValue dfpr_wb, dfnr_wb, eqodds_wb;
  MetricValue dfpr_wo, dfnr_wo, eqodds_wo;

  std::array<MetricValue, 7> as_array() const {
    return {accuracy, dfpr_wb, dfnr_wb, eqodds_wb, dfpr_wo, dfnr_wo, eqodds_wo};
  }
};

inline constexpr std::array<const char*, 7> kMetricNames = {
    "accuracy", "dfpr_wb", "dfnr_wb", "eqodds_wb",
    "dfpr_wo",  "dfnr_wo", "eqodds_wo"};

FairnessScores score_predictions(const std::vector<std::uint8_t>& y,
                                 const std::vector<std::uint8_t>& y_hat,
                                 const std::vector<Group>& g);

}  // namespace fairshift
