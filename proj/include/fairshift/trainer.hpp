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

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fairshift/dataset.hpp"
#include "fairshift/encode.hpp"

namespace fairshift {

struct TrainerConfig {
  double lambda = 1.0;          // L2 strength on coefficients
  double eta = 1.0;             // prejudice-regularizer strength
  int max_iterations = 500;
  double grad_tolerance = 1e-6;  // on the gradient 2-norm
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError on negative strengths etc.
};

struct Convergence {
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::vector<double> loss_trace;  // non-increasing across accepted steps
};

// Fitted logistic parameters: one coefficient row and intercept per group.
// Shared models replicate a single vector across all rows.
struct ModelParams {
  Eigen::MatrixXd coefficients;  // kGroupCount × d
  Eigen::Vector3d intercepts = Eigen::Vector3d::Zero();
  bool shared = false;
  std::array<bool, kGroupCount> fitted{};
  TrainerConfig config;
  Convergence convergence;

  Eigen::Index dim() const { return coefficients.cols(); }

  nlohmann::json to_json() const;
  static ModelParams from_json(const nlohmann::json& j);
};

struct Predictions {
  std::vector<double> prob;
  std::vector<std::uint8_t> label;  // 1 iff prob > 0.5, ties to 0
};

// Per-row weights, positive and count-preserving per vector (Σw = n).
using SampleWeights = std::vector<double>;

// Weight for a row in cell (g, y) is (n_g · n_y) / (n · n_{g,y}): the
// weighted joint of group and class then factorizes into its marginals.
// A present group and present class whose joint cell is empty make that
// impossible; such cells raise a TrainingError naming the cell.
SampleWeights compute_reweighing_weights(const Dataset& ds);

// Weighted logistic regression: minimizes Σ_i w_i·nll_i + (λ/2)·‖θ‖² with
// the intercept unpenalized. One shared coefficient vector for all groups.
ModelParams train_vanilla(const EncodedMatrix& X,
                          const std::vector<std::uint8_t>& y,
                          const SampleWeights& w, const TrainerConfig& cfg);

// Group-aware logistic regression with a prejudice penalty: minimizes
// Σ_i w_i·nll_i + η·PI + (λ/2)·Σ_g‖θ_g‖² over per-group coefficients,
// where PI = Σ_i Σ_c p_c(x_i,g_i)·ln(P̂(ŷ=c|g_i)/P̂(ŷ=c)) and the P̂ terms
// are weighted means of predicted probabilities. Every group must appear
// in the training rows.
ModelParams train_prejudice_remover(const EncodedMatrix& X,
                                    const std::vector<std::uint8_t>& y,
                                    const std::vector<Group>& g,
                                    const SampleWeights& w,
                                    const TrainerConfig& cfg);

Predictions predict(const ModelParams& params, const EncodedMatrix& X,
                    const std::vector<Group>& g);

// --- objective seams, exposed for gradient audits and penalty sweeps ---

// params layout: [θ (d), b]. Returns the objective value; fills *grad when
// non-null.
double vanilla_objective(const EncodedMatrix& X,
                         const std::vector<std::uint8_t>& y,
                         const SampleWeights& w, double lambda,
                         const Eigen::VectorXd& params, Eigen::VectorXd* grad);

// params layout: [θ_W (d), b_W, θ_B (d), b_B, θ_O (d), b_O].
double prejudice_objective(const EncodedMatrix& X,
                           const std::vector<std::uint8_t>& y,
                           const std::vector<Group>& g, const SampleWeights& w,
                           double lambda, double eta,
                           const Eigen::VectorXd& params,
                           Eigen::VectorXd* grad);

// Prejudice index of a fitted model on a dataset.
double prejudice_index(const EncodedMatrix& X, const std::vector<Group>& g,
                       const SampleWeights& w, const ModelParams& params);

Eigen::VectorXd pack_group_params(const ModelParams& params);

}  // namespace fairshift
