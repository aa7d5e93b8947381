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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairshift/dataset.hpp"
#include "fairshift/encode.hpp"
#include "fairshift/schema.hpp"

namespace fairshift {

double linear_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b);

// Squared MMD with the linear kernel: exactly ‖mean(X) − mean(V)‖²,
// computed from mean embeddings in O((m+n)·d). Always ≥ 0.
double mmd2_biased(const EncodedMatrix& X, const EncodedMatrix& V);

// U-statistic estimate: within-set kernel averages exclude the diagonal and
// are normalized by m(m−1); may be negative. Both sets need ≥ 2 rows.
double mmd2_unbiased(const EncodedMatrix& X, const EncodedMatrix& V);

struct MmdResult {
  double biased = 0.0;
  std::optional<double> unbiased;  // absent when either set has < 2 rows
  std::size_t m = 0;
  std::size_t n = 0;
  std::string kernel = "linear";
};

MmdResult mmd_pair(const EncodedMatrix& X, const EncodedMatrix& V);

enum class MmdEstimator : std::uint8_t { Biased, Unbiased };

const char* to_string(MmdEstimator est);
MmdEstimator estimator_from_string(const std::string& s);  // ConfigError

// Min-max over the off-diagonal entries: (v − min)/(max − min), all zeros
// when max = min. The diagonal stays 0. Rank-preserving.
Eigen::MatrixXd normalize_offdiagonal(const Eigen::MatrixXd& values);

// Per context, the sum over all other contexts of the pairwise value.
std::vector<double> mmd_row_sums(const Eigen::MatrixXd& values);

// Pairwise context distances over one shared encoding of the features
// (group attribute and label excluded). Row sums are taken over normalized
// values to give a single dissimilarity score per context; raw sums are
// kept alongside.
struct MmdMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd raw;         // symmetric, zero diagonal
  Eigen::MatrixXd normalized;  // entries in [0,1]
  std::vector<double> row_sums_normalized;
  std::vector<double> row_sums_raw;
  MmdEstimator estimator = MmdEstimator::Biased;
};

// Computed once per unordered pair over the local members of the
// collection. Needs ≥ 2 contexts; the unbiased estimator needs ≥ 2 rows in
// every context.
MmdMatrix pairwise_mmd(const ContextCollection& coll, const Schema& schema,
                       MmdEstimator estimator = MmdEstimator::Biased);

// Distance of every local context to one global dataset, under an encoder
// fitted on global and locals together. Normalization is min-max over this
// vector of values.
struct GlobalLocalMmd {
  std::vector<std::string> ids;
  std::vector<double> raw;
  std::vector<double> normalized;
  MmdEstimator estimator = MmdEstimator::Biased;
};

GlobalLocalMmd global_local_mmd(const Dataset& global,
                                const ContextCollection& coll,
                                const Schema& schema,
                                MmdEstimator estimator = MmdEstimator::Biased);

}  // namespace fairshift
