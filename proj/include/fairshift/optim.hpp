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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fairshift {

// Evaluates the objective at x and fills grad (same size as x).
using Objective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct OptimOptions {
  int max_iterations = 500;
  double grad_tolerance = 1e-6;  // on the gradient 2-norm
  int memory = 10;               // stored curvature pairs
};

struct OptimResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;  // accepted steps
  bool converged = false;
  // Objective value at the start and after each accepted step; Armijo
  // acceptance makes this non-increasing.
  std::vector<double> loss_trace;
};

// Deterministic full-batch L-BFGS with Armijo backtracking. Non-descent
// directions fall back to steepest descent. Throws TrainingError when the
// objective or gradient turns non-finite, naming the iteration.
OptimResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                           const OptimOptions& opts);

}  // namespace fairshift
