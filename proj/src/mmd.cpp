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

#include "fairshift/mmd.hpp"

#include <limits>

#include "fairshift/errors.hpp"

namespace fairshift {

namespace {

void check_cols(const EncodedMatrix& X, const EncodedMatrix& V) {
  if (X.cols() != V.cols()) {
    throw DataError("MMD inputs have different dimensions: " +
                    std::to_string(X.cols()) + " vs " +
                    std::to_string(V.cols()));
  }
}

EncodedAggregate aggregate_of(const EncodedMatrix& X) {
  EncodedAggregate agg;
  agg.rows = static_cast<std::size_t>(X.rows());
  agg.sum = X.colwise().sum().transpose();
  agg.sum_sq_norms = X.rowwise().squaredNorm().sum();
  return agg;
}

double biased_from(const EncodedAggregate& a, const EncodedAggregate& b) {
  if (a.rows == 0 || b.rows == 0) {
    throw DataError("MMD needs at least 1 row per set");
  }
  const Eigen::VectorXd diff = a.sum / static_cast<double>(a.rows) -
                               b.sum / static_cast<double>(b.rows);
  return diff.squaredNorm();
}

// For the linear kernel, Σ_{i≠j} k(x_i, x_j) = ‖Σx‖² − Σ‖x_i‖² and the
// cross sum is (Σx)·(Σv), so the U-statistic needs only the aggregates.
double unbiased_from(const EncodedAggregate& a, const EncodedAggregate& b) {
  if (a.rows < 2 || b.rows < 2) {
    throw DataError("unbiased MMD needs at least 2 rows per set");
  }
  const auto m = static_cast<double>(a.rows);
  const auto n = static_cast<double>(b.rows);
  const double within_a =
      (a.sum.squaredNorm() - a.sum_sq_norms) / (m * (m - 1.0));
  const double within_b =
      (b.sum.squaredNorm() - b.sum_sq_norms) / (n * (n - 1.0));
  const double cross = 2.0 * a.sum.dot(b.sum) / (m * n);
  return within_a + within_b - cross;
}

double pair_from(const EncodedAggregate& a, const EncodedAggregate& b,
                 MmdEstimator est) {
  return est == MmdEstimator::Biased ? biased_from(a, b)
                                     : unbiased_from(a, b);
}

}  // namespace

double linear_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) {
    throw DataError("kernel arguments have different lengths: " +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  return a.dot(b);
}

double mmd2_biased(const EncodedMatrix& X, const EncodedMatrix& V) {
  check_cols(X, V);
  return biased_from(aggregate_of(X), aggregate_of(V));
}

double mmd2_unbiased(const EncodedMatrix& X, const EncodedMatrix& V) {
  check_cols(X, V);
  return unbiased_from(aggregate_of(X), aggregate_of(V));
}

MmdResult mmd_pair(const EncodedMatrix& X, const EncodedMatrix& V) {
  check_cols(X, V);
  const EncodedAggregate a = aggregate_of(X);
  const EncodedAggregate b = aggregate_of(V);
  MmdResult res;
  res.m = a.rows;
  res.n = b.rows;
  res.biased = biased_from(a, b);
  if (a.rows >= 2 && b.rows >= 2) res.unbiased = unbiased_from(a, b);
  return res;
}

const char* to_string(MmdEstimator est) {
  return est == MmdEstimator::Biased ? "biased" : "unbiased";
}

MmdEstimator estimator_from_string(const std::string& s) {
  if (s == "biased") return MmdEstimator::Biased;
  if (s == "unbiased") return MmdEstimator::Unbiased;
  throw ConfigError("unknown MMD estimator: \"" + s +
                    "\" (expected \"biased\" or \"unbiased\")");
}

Eigen::MatrixXd normalize_offdiagonal(const Eigen::MatrixXd& values) {
  const Eigen::Index n = values.rows();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lo = std::min(lo, values(i, j));
      hi = std::max(hi, values(i, j));
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (!(hi > lo)) return out;  // constant or empty off-diagonal
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out(i, j) = (values(i, j) - lo) / (hi - lo);
    }
  }
  return out;
}

std::vector<double> mmd_row_sums(const Eigen::MatrixXd& values) {
  std::vector<double> sums(static_cast<std::size_t>(values.rows()), 0.0);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (i == j) continue;
      sums[static_cast<std::size_t>(i)] += values(i, j);
    }
  }
  return sums;
}

MmdMatrix pairwise_mmd(const ContextCollection& coll, const Schema& schema,
                       MmdEstimator estimator) {
  const std::vector<std::string> ids = coll.local_ids();
  if (ids.size() < 2) {
    throw DataError("pairwise MMD needs at least 2 contexts");
  }

  std::vector<const Dataset*> parts;
  parts.reserve(ids.size());
  for (const auto& id : ids) parts.push_back(&coll.at(id));
  const EncoderSpec spec = fit_encoder(parts, schema);

  std::vector<EncodedAggregate> aggs;
  aggs.reserve(ids.size());
  for (const auto* ds : parts) aggs.push_back(accumulate_encoded(spec, *ds));

  const auto n = static_cast<Eigen::Index>(ids.size());
  MmdMatrix mat;
  mat.ids = ids;
  mat.estimator = estimator;
  mat.raw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = pair_from(aggs[static_cast<std::size_t>(i)],
                                 aggs[static_cast<std::size_t>(j)], estimator);
      mat.raw(i, j) = v;
      mat.raw(j, i) = v;
    }
  }
  mat.normalized = normalize_offdiagonal(mat.raw);
  mat.row_sums_normalized = mmd_row_sums(mat.normalized);
  mat.row_sums_raw = mmd_row_sums(mat.raw);
  return mat;
}

GlobalLocalMmd global_local_mmd(const Dataset& global,
                                const ContextCollection& coll,
                                const Schema& schema, MmdEstimator estimator) {
  const std::vector<std::string> ids = coll.local_ids();
  if (ids.empty()) throw DataError("collection has no local contexts");

  std::vector<const Dataset*> parts;
  parts.reserve(ids.size() + 1);
  parts.push_back(&global);
  for (const auto& id : ids) parts.push_back(&coll.at(id));
  const EncoderSpec spec = fit_encoder(parts, schema);

  const EncodedAggregate global_agg = accumulate_encoded(spec, global);

  GlobalLocalMmd out;
  out.ids = ids;
  out.estimator = estimator;
  out.raw.reserve(ids.size());
  for (const auto& id : ids) {
    const EncodedAggregate agg = accumulate_encoded(spec, coll.at(id));
    out.raw.push_back(pair_from(agg, global_agg, estimator));
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : out.raw) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.normalized.assign(out.raw.size(), 0.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < out.raw.size(); ++i) {
      out.normalized[i] = (out.raw[i] - lo) / (hi - lo);
    }
  }
  return out;
}

}  // namespace fairshift
