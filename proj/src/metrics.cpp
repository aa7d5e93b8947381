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

#include "fairshift/metrics.hpp"

#include <cmath>

#include "fairshift/errors.hpp"

namespace fairshift {

std::size_t GroupConfusion::total() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.total();
  return n;
}

GroupConfusion confusion_by_group(const std::vector<std::uint8_t>& y,
                                  const std::vector<std::uint8_t>& y_hat,
                                  const std::vector<Group>& g) {
  if (y.size() != y_hat.size() || y.size() != g.size()) {
    throw DataError("labels, predictions, and groups differ in length");
  }
  GroupConfusion conf;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ConfusionCell& c = conf.cells[static_cast<std::size_t>(g[i])];
    if (y[i]) {
      if (y_hat[i]) {
        ++c.tp;
      } else {
        ++c.fn;
      }
    } else {
      if (y_hat[i]) {
        ++c.fp;
      } else {
        ++c.tn;
      }
    }
  }
  return conf;
}

MetricValue delta_fnr(const GroupConfusion& conf, Group other,
                      Group reference) {
  const ConfusionCell& r = conf.of(reference);
  const ConfusionCell& o = conf.of(other);
  if (r.positives() == 0 || o.positives() == 0) return {};
  const double fnr_r =
      static_cast<double>(r.fn) / static_cast<double>(r.positives());
  const double fnr_o =
      static_cast<double>(o.fn) / static_cast<double>(o.positives());
  return {std::fabs(fnr_r - fnr_o), true};
}

MetricValue delta_fpr(const GroupConfusion& conf, Group other,
                      Group reference) {
  const ConfusionCell& r = conf.of(reference);
  const ConfusionCell& o = conf.of(other);
  if (r.negatives() == 0 || o.negatives() == 0) return {};
  const double fpr_r =
      static_cast<double>(r.fp) / static_cast<double>(r.negatives());
  const double fpr_o =
      static_cast<double>(o.fp) / static_cast<double>(o.negatives());
  return {std::fabs(fpr_r - fpr_o), true};
}

MetricValue eq_odds(MetricValue dfpr, MetricValue dfnr) {
  if (!dfpr.defined || !dfnr.defined) return {};
  return {std::fabs(dfpr.value) + std::fabs(dfnr.value), true};
}

FairnessScores score_predictions(const std::vector<std::uint8_t>& y,
                                 const std::vector<std::uint8_t>& y_hat,
                                 const std::vector<Group>& g) {
  const GroupConfusion conf = confusion_by_group(y, y_hat, g);
  FairnessScores s;
  const std::size_t n = conf.total();
  if (n > 0) {
    std::size_t correct = 0;
    for (const auto& c : conf.cells) correct += c.tp + c.tn;
    s.accuracy = {static_cast<double>(correct) / static_cast<double>(n), true};
  }
  s.dfpr_wb = delta_fpr(conf, Group::B);
  s.dfnr_wb = delta_fnr(conf, Group::B);
  s.eqodds_wb = eq_odds(s.dfpr_wb, s.dfnr_wb);
  s.dfpr_wo = delta_fpr(conf, Group::O);
  s.dfnr_wo = delta_fnr(conf, Group::O);
  s.eqodds_wo = eq_odds(s.dfpr_wo, s.dfnr_wo);
  return s;
}

}  // namespace fairshift
