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

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fairshift/dataset.hpp"
#include "fairshift/schema.hpp"

namespace fairshift {

using EncodedMatrix = Eigen::MatrixXd;

// Encoding recipe for one feature: standardization stats for numerics,
// ordered one-hot positions for categoricals.
struct FeatureEncoding {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  double mean = 0.0;
  double stddev = 1.0;  // population convention; constant features get 1
  std::vector<std::string> categories;  // sorted, duplicate-free

  std::size_t width() const {
    return kind == ColumnKind::Numeric ? 1 : categories.size();
  }
};

// Dataset-to-matrix recipe fitted on training rows only. Transforming any
// dataset with the same column layout is pure and row-order preserving;
// categories unseen at fit time encode as an all-zero block.
struct EncoderSpec {
  std::vector<FeatureEncoding> features;

  std::size_t dim() const;

  nlohmann::json to_json() const;
  static EncoderSpec from_json(const nlohmann::json& j);
};

// Fit on one dataset, or on several without materializing their union.
// min_category_count comes from the schema: categories seen fewer times
// across the fitting rows are dropped from the one-hot block.
EncoderSpec fit_encoder(const Dataset& train, const Schema& schema);
EncoderSpec fit_encoder(std::span<const Dataset* const> parts,
                        const Schema& schema);

EncodedMatrix transform(const EncoderSpec& spec, const Dataset& ds);

// Sufficient aggregates of an encoded dataset for inner-product kernels:
// row count, column sums, and the total of squared row norms. Computed in
// row blocks so large datasets never materialize an m×d matrix.
struct EncodedAggregate {
  std::size_t rows = 0;
  Eigen::VectorXd sum;      // length = spec.dim()
  double sum_sq_norms = 0;  // Σ_i ‖x_i‖²
};

EncodedAggregate accumulate_encoded(const EncoderSpec& spec, const Dataset& ds);

}  // namespace fairshift
