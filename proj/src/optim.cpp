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

#include "fairshift/optim.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "fairshift/errors.hpp"

namespace fairshift {

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kStepShrink = 0.5;
constexpr double kMinStep = 1e-20;

void check_finite(double fx, const Eigen::VectorXd& grad, int iteration) {
  if (!std::isfinite(fx) || !grad.allFinite()) {
    throw TrainingError("non-finite loss at iteration " +
                        std::to_string(iteration));
  }
}

}  // namespace

OptimResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                           const OptimOptions& opts) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  res.x = std::move(x0);

  Eigen::VectorXd grad(n), grad_next(n), x_next(n), direction(n);
  double fx = f(res.x, grad);
  check_finite(fx, grad, 0);
  res.loss_trace.push_back(fx);

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> history;

  std::vector<double> alpha_buf;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.grad_norm = grad.norm();
    if (res.grad_norm <= opts.grad_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion over stored curvature pairs.
    direction = -grad;
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t i = history.size(); i-- > 0;) {
      const Pair& p = history[i];
      alpha_buf[i] = p.rho * p.s.dot(direction);
      direction -= alpha_buf[i] * p.y;
    }
    if (!history.empty()) {
      const Pair& last = history.back();
      direction *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const Pair& p = history[i];
      const double beta = p.rho * p.y.dot(direction);
      direction += (alpha_buf[i] - beta) * p.s;
    }

    double dg = grad.dot(direction);
    if (!(dg < 0.0)) {
      direction = -grad;
      dg = -res.grad_norm * res.grad_norm;
    }

    double step = 1.0;
    if (history.empty()) {
      step = std::min(1.0, 1.0 / res.grad_norm);
    }
    double fx_next = 0.0;
    bool accepted = false;
    while (step >= kMinStep) {
      x_next = res.x + step * direction;
      fx_next = f(x_next, grad_next);
      check_finite(fx_next, grad_next, iter + 1);
      if (fx_next <= fx + kArmijoC1 * step * dg) {
        accepted = true;
        break;
      }
      step *= kStepShrink;
    }
    if (!accepted) break;  // no further progress at machine precision

    Pair p;
    p.s = x_next - res.x;
    p.y = grad_next - grad;
    const double sy = p.s.dot(p.y);
    if (sy > 1e-10 * p.s.norm() * p.y.norm()) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > static_cast<std::size_t>(opts.memory)) {
        history.pop_front();
      }
    }

    res.x.swap(x_next);
    grad.swap(grad_next);
    fx = fx_next;
    res.loss_trace.push_back(fx);
    res.iterations = iter + 1;
    res.grad_norm = grad.norm();
  }

  res.fx = fx;
  res.grad_norm = grad.norm();
  if (res.grad_norm <= opts.grad_tolerance) res.converged = true;
  return res;
}

}  // namespace fairshift
