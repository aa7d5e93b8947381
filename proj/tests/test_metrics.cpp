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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fairshift/errors.hpp"
#include "fairshift/metrics.hpp"

using namespace fairshift;

namespace {

// Straight-from-definition reference: per-group rates computed by looping
// over rows, differences taken only when both conditioning sets are
// non-empty.
struct OracleRates {
  double fpr = 0.0, fnr = 0.0;
  bool fpr_defined = false, fnr_defined = false;
};

OracleRates oracle_rates(const std::vector<std::uint8_t>& y,
                         const std::vector<std::uint8_t>& yh,
                         const std::vector<Group>& g, Group which) {
  std::size_t fp = 0, tn = 0, fn = 0, tp = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (g[i] != which) continue;
    if (y[i] == 1 && yh[i] == 1) ++tp;
    if (y[i] == 1 && yh[i] == 0) ++fn;
    if (y[i] == 0 && yh[i] == 1) ++fp;
    if (y[i] == 0 && yh[i] == 0) ++tn;
  }
  OracleRates r;
  if (fp + tn > 0) {
    r.fpr = double(fp) / double(fp + tn);
    r.fpr_defined = true;
  }
  if (tp + fn > 0) {
    r.fnr = double(fn) / double(tp + fn);
    r.fnr_defined = true;
  }
  return r;
}

void check_against_oracle(const std::vector<std::uint8_t>& y,
                          const std::vector<std::uint8_t>& yh,
                          const std::vector<Group>& g) {
  FairnessScores s = score_predictions(y, yh, g);
  OracleRates w = oracle_rates(y, yh, g, Group::W);
  for (auto [other, dfpr, dfnr, eq] :
       {std::tuple{Group::B, s.dfpr_wb, s.dfnr_wb, s.eqodds_wb},
        std::tuple{Group::O, s.dfpr_wo, s.dfnr_wo, s.eqodds_wo}}) {
    OracleRates o = oracle_rates(y, yh, g, other);
    CHECK(dfpr.defined == (w.fpr_defined && o.fpr_defined));
    if (dfpr.defined) {
      CHECK(dfpr.value == doctest::Approx(std::abs(w.fpr - o.fpr))
                              .epsilon(1e-14));
    }
    CHECK(dfnr.defined == (w.fnr_defined && o.fnr_defined));
    if (dfnr.defined) {
      CHECK(dfnr.value == doctest::Approx(std::abs(w.fnr - o.fnr))
                              .epsilon(1e-14));
    }
    CHECK(eq.defined == (dfpr.defined && dfnr.defined));
    if (eq.defined) {
      CHECK(eq.value ==
            doctest::Approx(dfpr.value + dfnr.value).epsilon(1e-14));
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += (y[i] == yh[i]);
  CHECK(s.accuracy.defined == !y.empty());
  if (s.accuracy.defined) {
    CHECK(s.accuracy.value ==
          doctest::Approx(double(correct) / double(y.size())).epsilon(1e-14));
  }
}

}  // namespace

TEST_CASE("confusion counts land in the right per-group cells") {
  std::vector<std::uint8_t> y = {1, 1, 0};
  std::vector<std::uint8_t> yh = {0, 1, 1};
  std::vector<Group> g = {Group::W, Group::B, Group::B};
  GroupConfusion conf = confusion_by_group(y, yh, g);
  CHECK(conf.of(Group::W).fn == 1);
  CHECK(conf.of(Group::W).total() == 1);
  CHECK(conf.of(Group::B).tp == 1);
  CHECK(conf.of(Group::B).fp == 1);
  CHECK(conf.of(Group::O).total() == 0);
  CHECK(conf.total() == 3);
}

TEST_CASE("mismatched vector lengths are rejected") {
  CHECK_THROWS_AS(confusion_by_group({1, 0}, {1}, {Group::W, Group::B}),
                  DataError);
}

TEST_CASE("a hand-built case produces the expected gaps") {
  // W: 2 positives (1 hit, 1 miss), 2 negatives (both correct).
  // B: 2 positives (both missed), 2 negatives (1 false positive).
  std::vector<std::uint8_t> y = {1, 1, 0, 0, 1, 1, 0, 0};
  std::vector<std::uint8_t> yh = {1, 0, 0, 0, 0, 0, 1, 0};
  std::vector<Group> g(8, Group::W);
  for (int i = 4; i < 8; ++i) g[i] = Group::B;

  FairnessScores s = score_predictions(y, yh, g);
  CHECK(s.dfnr_wb.defined);
  CHECK(s.dfnr_wb.value == doctest::Approx(0.5));   // |0.5 − 1.0|
  CHECK(s.dfpr_wb.defined);
  CHECK(s.dfpr_wb.value == doctest::Approx(0.5));   // |0.0 − 0.5|
  CHECK(s.eqodds_wb.value == doctest::Approx(1.0));
  CHECK_FALSE(s.dfpr_wo.defined);  // no O rows at all
  CHECK_FALSE(s.eqodds_wo.defined);
  CHECK(s.accuracy.value == doctest::Approx(4.0 / 8.0));
}

TEST_CASE("perfect predictions have zero gaps everywhere defined") {
  std::vector<std::uint8_t> y = {1, 0, 1, 0, 1, 0};
  std::vector<Group> g = {Group::W, Group::W, Group::B,
                          Group::B, Group::O, Group::O};
  FairnessScores s = score_predictions(y, y, g);
  CHECK(s.accuracy.value == 1.0);
  for (const auto& m : {s.dfpr_wb, s.dfnr_wb, s.eqodds_wb, s.dfpr_wo,
                        s.dfnr_wo, s.eqodds_wo}) {
    CHECK(m.defined);
    CHECK(m.value == 0.0);
  }
}

TEST_CASE("an empty conditioning class makes the gap undefined, not zero") {
  // No ground-truth positives among W: every FNR comparison to W undefined.
  std::vector<std::uint8_t> y = {0, 0, 1, 0};
  std::vector<std::uint8_t> yh = {0, 1, 1, 0};
  std::vector<Group> g = {Group::W, Group::W, Group::B, Group::B};
  FairnessScores s = score_predictions(y, yh, g);
  CHECK_FALSE(s.dfnr_wb.defined);
  CHECK(s.dfpr_wb.defined);
  CHECK_FALSE(s.eqodds_wb.defined);  // one leg missing poisons the sum

  // No B negatives: the FPR side goes undefined instead.
  std::vector<std::uint8_t> y2 = {0, 1, 1, 1};
  FairnessScores s2 = score_predictions(y2, yh, g);
  CHECK(s2.dfnr_wb.defined);
  CHECK_FALSE(s2.dfpr_wb.defined);
}

TEST_CASE("swapping all labels and predictions swaps the two gap families") {
  std::mt19937 rng(99);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 40;
    std::vector<std::uint8_t> y(n), yh(n);
    std::vector<Group> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng() % 2;
      yh[i] = rng() % 2;
      g[i] = static_cast<Group>(rng() % 3);
    }
    std::vector<std::uint8_t> y_sw(n), yh_sw(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_sw[i] = 1 - y[i];
      yh_sw[i] = 1 - yh[i];
    }
    FairnessScores a = score_predictions(y, yh, g);
    FairnessScores b = score_predictions(y_sw, yh_sw, g);
    CHECK(a.dfpr_wb.defined == b.dfnr_wb.defined);
    if (a.dfpr_wb.defined) {
      CHECK(a.dfpr_wb.value == doctest::Approx(b.dfnr_wb.value));
    }
    if (a.dfnr_wb.defined) {
      CHECK(a.dfnr_wb.value == doctest::Approx(b.dfpr_wb.value));
    }
  }
}

TEST_CASE("scores are invariant to row permutation") {
  std::mt19937 rng(7);
  std::size_t n = 60;
  std::vector<std::uint8_t> y(n), yh(n);
  std::vector<Group> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng() % 2;
    yh[i] = rng() % 2;
    g[i] = static_cast<Group>(rng() % 3);
  }
  FairnessScores a = score_predictions(y, yh, g);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::uint8_t> y2(n), yh2(n);
  std::vector<Group> g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    y2[i] = y[perm[i]];
    yh2[i] = yh[perm[i]];
    g2[i] = g[perm[i]];
  }
  FairnessScores b = score_predictions(y2, yh2, g2);
  for (std::size_t m = 0; m < 7; ++m) {
    CHECK(a.as_array()[m].defined == b.as_array()[m].defined);
    CHECK(a.as_array()[m].value == b.as_array()[m].value);
  }
}

TEST_CASE("random instances agree with the from-definition oracle") {
  std::mt19937 rng(1234);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng() % 30;
    std::vector<std::uint8_t> y(n), yh(n);
    std::vector<Group> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng() % 2;
      yh[i] = rng() % 2;
      g[i] = static_cast<Group>(rng() % 3);
    }
    check_against_oracle(y, yh, g);
  }
}

TEST_CASE("defined gaps stay inside their ranges") {
  std::mt19937 rng(4321);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 2 + rng() % 25;
    std::vector<std::uint8_t> y(n), yh(n);
    std::vector<Group> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng() % 2;
      yh[i] = rng() % 2;
      g[i] = static_cast<Group>(rng() % 3);
    }
    FairnessScores s = score_predictions(y, yh, g);
    for (const auto& m : {s.dfpr_wb, s.dfnr_wb, s.dfpr_wo, s.dfnr_wo}) {
      if (m.defined) {
        CHECK(m.value >= 0.0);
        CHECK(m.value <= 1.0);
      }
    }
    for (const auto& m : {s.eqodds_wb, s.eqodds_wo}) {
      if (m.defined) {
        CHECK(m.value >= 0.0);
        CHECK(m.value <= 2.0);
      }
    }
  }
}
