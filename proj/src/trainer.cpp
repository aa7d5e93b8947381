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

#include "fairshift/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairshift/errors.hpp"
#include "fairshift/optim.hpp"

namespace fairshift {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ln(1 + e^z) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

void check_rows(std::size_t m, const std::vector<std::uint8_t>& y,
                const SampleWeights& w) {
  if (y.size() != m || w.size() != m) {
    throw DataError("matrix rows, labels, and weights differ in length");
  }
}

// Weighted and unweighted probability sums, overall and per group.
struct ProbStats {
  double weight_total = 0.0;
  double weighted_prob = 0.0;  // Σ w_i p_i
  double prob_total = 0.0;     // Σ p_i
  std::array<double, kGroupCount> group_weight{};
  std::array<double, kGroupCount> group_weighted_prob{};
  std::array<double, kGroupCount> group_prob{};
  std::array<double, kGroupCount> group_count{};

  double q() const { return clamp_prob(weighted_prob / weight_total); }
  double q_group(std::size_t h) const {
    return clamp_prob(group_weighted_prob[h] / group_weight[h]);
  }
};

ProbStats accumulate_prob_stats(const Eigen::VectorXd& p,
                                const std::vector<Group>& g,
                                const SampleWeights& w) {
  ProbStats st;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const auto h = static_cast<std::size_t>(g[static_cast<std::size_t>(i)]);
    st.weight_total += w[static_cast<std::size_t>(i)];
    st.weighted_prob += w[static_cast<std::size_t>(i)] * p[i];
    st.prob_total += p[i];
    st.group_weight[h] += w[static_cast<std::size_t>(i)];
    st.group_weighted_prob[h] += w[static_cast<std::size_t>(i)] * p[i];
    st.group_prob[h] += p[i];
    st.group_count[h] += 1.0;
  }
  return st;
}

double prejudice_index_value(const ProbStats& st) {
  const double q = st.q();
  double pi = 0.0;
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (st.group_count[h] == 0.0) continue;
    const double qh = st.q_group(h);
    pi += st.group_prob[h] * std::log(qh / q);
    pi += (st.group_count[h] - st.group_prob[h]) *
          std::log((1.0 - qh) / (1.0 - q));
  }
  return pi;
}

Eigen::VectorXd group_scores(const ModelParams& params,
                             const EncodedMatrix& X,
                             const std::vector<Group>& g) {
  if (X.cols() != params.dim()) {
    throw DataError("matrix width does not match model dimension");
  }
  if (g.size() != static_cast<std::size_t>(X.rows())) {
    throw DataError("group vector length does not match matrix rows");
  }
  Eigen::VectorXd z(X.rows());
  if (params.shared) {
    z = X * params.coefficients.row(0).transpose();
    z.array() += params.intercepts[0];
    return z;
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto h = static_cast<std::size_t>(g[static_cast<std::size_t>(i)]);
    if (!params.fitted[h]) {
      throw DataError(std::string("no fitted coefficients for group ") +
                      to_string(static_cast<Group>(h)));
    }
    z[i] = X.row(i).dot(params.coefficients.row(static_cast<Eigen::Index>(h))) +
           params.intercepts[static_cast<Eigen::Index>(h)];
  }
  return z;
}

nlohmann::json config_to_json(const TrainerConfig& cfg) {
  return {{"lambda", cfg.lambda},
          {"eta", cfg.eta},
          {"max_iterations", cfg.max_iterations},
          {"grad_tolerance", cfg.grad_tolerance},
          {"seed", cfg.seed}};
}

TrainerConfig config_from_json(const nlohmann::json& j) {
  TrainerConfig cfg;
  cfg.lambda = j.at("lambda").get<double>();
  cfg.eta = j.at("eta").get<double>();
  cfg.max_iterations = j.at("max_iterations").get<int>();
  cfg.grad_tolerance = j.at("grad_tolerance").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

void TrainerConfig::validate() const {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw ConfigError("L2 strength lambda must be >= 0");
  }
  if (eta < 0.0 || !std::isfinite(eta)) {
    throw ConfigError("prejudice strength eta must be >= 0");
  }
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(grad_tolerance > 0.0)) throw ConfigError("grad_tolerance must be > 0");
}

nlohmann::json ModelParams::to_json() const {
  nlohmann::json coef = nlohmann::json::object();
  nlohmann::json inter = nlohmann::json::object();
  nlohmann::json fit = nlohmann::json::object();
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    const auto* name = to_string(static_cast<Group>(h));
    std::vector<double> row(coefficients.cols());
    for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
      row[static_cast<std::size_t>(c)] =
          coefficients(static_cast<Eigen::Index>(h), c);
    }
    coef[name] = row;
    inter[name] = intercepts[static_cast<Eigen::Index>(h)];
    fit[name] = fitted[h];
  }
  return {{"coefficients", coef},
          {"intercepts", inter},
          {"shared", shared},
          {"fitted", fit},
          {"config", config_to_json(config)},
          {"convergence",
           {{"iterations", convergence.iterations},
            {"grad_norm", convergence.grad_norm},
            {"converged", convergence.converged},
            {"loss_trace", convergence.loss_trace}}}};
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
  ModelParams p;
  try {
    const auto& coef = j.at("coefficients");
    const auto first = coef.at("W").get<std::vector<double>>();
    p.coefficients.resize(kGroupCount, static_cast<Eigen::Index>(first.size()));
    for (std::size_t h = 0; h < kGroupCount; ++h) {
      const auto* name = to_string(static_cast<Group>(h));
      const auto row = coef.at(name).get<std::vector<double>>();
      if (row.size() != first.size()) {
        throw ConfigError("model document has ragged coefficient rows");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        p.coefficients(static_cast<Eigen::Index>(h),
                       static_cast<Eigen::Index>(c)) = row[c];
      }
      p.intercepts[static_cast<Eigen::Index>(h)] =
          j.at("intercepts").at(name).get<double>();
      p.fitted[h] = j.at("fitted").at(name).get<bool>();
    }
    p.shared = j.at("shared").get<bool>();
    p.config = config_from_json(j.at("config"));
    const auto& conv = j.at("convergence");
    p.convergence.iterations = conv.at("iterations").get<int>();
    p.convergence.grad_norm = conv.at("grad_norm").get<double>();
    p.convergence.converged = conv.at("converged").get<bool>();
    p.convergence.loss_trace = conv.at("loss_trace").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  }
  return p;
}

SampleWeights compute_reweighing_weights(const Dataset& ds) {
  const std::size_t n = ds.size();
  if (n == 0) throw TrainingError("cannot reweigh an empty dataset");

  std::array<std::array<std::size_t, 2>, kGroupCount> joint{};
  std::array<std::size_t, kGroupCount> per_group{};
  std::array<std::size_t, 2> per_class{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = static_cast<std::size_t>(ds.groups[i]);
    const std::size_t y = ds.labels[i] ? 1 : 0;
    ++joint[h][y];
    ++per_group[h];
    ++per_class[y];
  }
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (per_group[h] == 0) continue;
    for (std::size_t y = 0; y < 2; ++y) {
      if (per_class[y] == 0) continue;
      if (joint[h][y] == 0) {
        throw TrainingError(
            std::string("reweighing: empty cell (group ") +
            to_string(static_cast<Group>(h)) + ", class " +
            (y ? "positive" : "negative") + ")");
      }
    }
  }

  SampleWeights w(n);
  const auto dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = static_cast<std::size_t>(ds.groups[i]);
    const std::size_t y = ds.labels[i] ? 1 : 0;
    w[i] = (static_cast<double>(per_group[h]) *
            static_cast<double>(per_class[y])) /
           (dn * static_cast<double>(joint[h][y]));
  }
  return w;
}

double vanilla_objective(const EncodedMatrix& X,
                         const std::vector<std::uint8_t>& y,
                         const SampleWeights& w, double lambda,
                         const Eigen::VectorXd& params,
                         Eigen::VectorXd* grad) {
  const Eigen::Index d = X.cols();
  const Eigen::Index m = X.rows();
  check_rows(static_cast<std::size_t>(m), y, w);
  if (params.size() != d + 1) {
    throw DataError("parameter vector size does not match matrix width");
  }

  const auto theta = params.head(d);
  const double b = params[d];
  Eigen::VectorXd z = X * theta;
  z.array() += b;

  double loss = 0.0;
  Eigen::VectorXd residual(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    loss += w[idx] * (softplus(z[i]) - (y[idx] ? z[i] : 0.0));
    residual[i] = w[idx] * (sigmoid(z[i]) - (y[idx] ? 1.0 : 0.0));
  }
  loss += 0.5 * lambda * theta.squaredNorm();

  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = X.transpose() * residual + lambda * theta;
    (*grad)[d] = residual.sum();
  }
  return loss;
}

double prejudice_objective(const EncodedMatrix& X,
                           const std::vector<std::uint8_t>& y,
                           const std::vector<Group>& g, const SampleWeights& w,
                           double lambda, double eta,
                           const Eigen::VectorXd& params,
                           Eigen::VectorXd* grad) {
  const Eigen::Index d = X.cols();
  const Eigen::Index m = X.rows();
  const Eigen::Index stride = d + 1;
  check_rows(static_cast<std::size_t>(m), y, w);
  if (g.size() != static_cast<std::size_t>(m)) {
    throw DataError("group vector length does not match matrix rows");
  }
  if (params.size() != static_cast<Eigen::Index>(kGroupCount) * stride) {
    throw DataError("parameter vector size does not match matrix width");
  }

  Eigen::VectorXd z(m), p(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto h =
        static_cast<Eigen::Index>(g[static_cast<std::size_t>(i)]);
    z[i] = X.row(i).dot(params.segment(h * stride, d)) + params[h * stride + d];
    p[i] = sigmoid(z[i]);
  }

  double nll = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    nll += w[idx] * (softplus(z[i]) - (y[idx] ? z[i] : 0.0));
  }

  const ProbStats st = accumulate_prob_stats(p, g, w);
  const double pi = prejudice_index_value(st);

  double l2 = 0.0;
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    l2 += params.segment(static_cast<Eigen::Index>(h) * stride, d)
              .squaredNorm();
  }

  const double loss = nll + eta * pi + 0.5 * lambda * l2;
  if (!grad) return loss;

  // Per-group constants of the prejudice-index gradient. With
  // q_h = clamp(Σ_{i∈h} w_i p_i / W_h) and q = clamp(Σ w_i p_i / W):
  //   dPI/dz_j = p_j' · [ ln(q_h(1−q)/(q(1−q_h)))
  //                       + (w_j/W_h)·(S_h/q_h − (N_h−S_h)/(1−q_h))
  //                       + (w_j/W)·(−S/q + (N−S)/(1−q)) ]
  // where S_h, N_h are unweighted probability sums and counts.
  const double q = st.q();
  std::array<double, kGroupCount> log_ratio{};
  std::array<double, kGroupCount> dq_group{};
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (st.group_count[h] == 0.0) continue;
    const double qh = st.q_group(h);
    log_ratio[h] = std::log(qh / q) - std::log((1.0 - qh) / (1.0 - q));
    dq_group[h] = st.group_prob[h] / qh -
                  (st.group_count[h] - st.group_prob[h]) / (1.0 - qh);
  }
  const double dq_overall =
      -st.prob_total / q +
      (static_cast<double>(m) - st.prob_total) / (1.0 - q);

  grad->setZero(params.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto h = static_cast<std::size_t>(g[idx]);
    const double pp = p[i] * (1.0 - p[i]);
    const double dpi_dz = pp * (log_ratio[h] +
                                (w[idx] / st.group_weight[h]) * dq_group[h] +
                                (w[idx] / st.weight_total) * dq_overall);
    const double gi = w[idx] * (p[i] - (y[idx] ? 1.0 : 0.0)) + eta * dpi_dz;
    const auto hh = static_cast<Eigen::Index>(h);
    grad->segment(hh * stride, d) += gi * X.row(i).transpose();
    (*grad)[hh * stride + d] += gi;
  }
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    const auto hh = static_cast<Eigen::Index>(h);
    grad->segment(hh * stride, d) += lambda * params.segment(hh * stride, d);
  }
  return loss;
}

ModelParams train_vanilla(const EncodedMatrix& X,
                          const std::vector<std::uint8_t>& y,
                          const SampleWeights& w, const TrainerConfig& cfg) {
  cfg.validate();
  check_rows(static_cast<std::size_t>(X.rows()), y, w);
  if (X.rows() == 0) throw TrainingError("cannot train on an empty dataset");

  const Eigen::Index d = X.cols();
  OptimOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.grad_tolerance = cfg.grad_tolerance;
  const OptimResult res = minimize_lbfgs(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        return vanilla_objective(X, y, w, cfg.lambda, x, &grad);
      },
      Eigen::VectorXd::Zero(d + 1), opts);

  ModelParams params;
  params.shared = true;
  params.fitted = {true, true, true};
  params.coefficients =
      res.x.head(d).transpose().replicate(kGroupCount, 1);
  params.intercepts.setConstant(res.x[d]);
  params.config = cfg;
  params.convergence = {res.iterations, res.grad_norm, res.converged,
                        res.loss_trace};
  return params;
}

ModelParams train_prejudice_remover(const EncodedMatrix& X,
                                    const std::vector<std::uint8_t>& y,
                                    const std::vector<Group>& g,
                                    const SampleWeights& w,
                                    const TrainerConfig& cfg) {
  cfg.validate();
  check_rows(static_cast<std::size_t>(X.rows()), y, w);
  if (g.size() != static_cast<std::size_t>(X.rows())) {
    throw DataError("group vector length does not match matrix rows");
  }
  if (X.rows() == 0) throw TrainingError("cannot train on an empty dataset");

  std::array<std::size_t, kGroupCount> counts{};
  for (Group gi : g) ++counts[static_cast<std::size_t>(gi)];
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (counts[h] == 0) {
      throw TrainingError(std::string("group ") +
                          to_string(static_cast<Group>(h)) +
                          " absent from training data");
    }
  }

  const Eigen::Index d = X.cols();
  const Eigen::Index stride = d + 1;
  OptimOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.grad_tolerance = cfg.grad_tolerance;
  const OptimResult res = minimize_lbfgs(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        return prejudice_objective(X, y, g, w, cfg.lambda, cfg.eta, x, &grad);
      },
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kGroupCount) * stride),
      opts);

  ModelParams params;
  params.shared = false;
  params.fitted = {true, true, true};
  params.coefficients.resize(kGroupCount, d);
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    const auto hh = static_cast<Eigen::Index>(h);
    params.coefficients.row(hh) = res.x.segment(hh * stride, d).transpose();
    params.intercepts[hh] = res.x[hh * stride + d];
  }
  params.config = cfg;
  params.convergence = {res.iterations, res.grad_norm, res.converged,
                        res.loss_trace};
  return params;
}

Predictions predict(const ModelParams& params, const EncodedMatrix& X,
                    const std::vector<Group>& g) {
  const Eigen::VectorXd z = group_scores(params, X, g);
  Predictions out;
  out.prob.resize(static_cast<std::size_t>(z.size()));
  out.label.resize(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z[i]);
    out.prob[static_cast<std::size_t>(i)] = p;
    out.label[static_cast<std::size_t>(i)] = p > 0.5 ? 1 : 0;
  }
  return out;
}

double prejudice_index(const EncodedMatrix& X, const std::vector<Group>& g,
                       const SampleWeights& w, const ModelParams& params) {
  if (w.size() != static_cast<std::size_t>(X.rows())) {
    throw DataError("weight vector length does not match matrix rows");
  }
  const Eigen::VectorXd z = group_scores(params, X, g);
  Eigen::VectorXd p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
  return prejudice_index_value(accumulate_prob_stats(p, g, w));
}

Eigen::VectorXd pack_group_params(const ModelParams& params) {
  const Eigen::Index d = params.dim();
  const Eigen::Index stride = d + 1;
  Eigen::VectorXd x(static_cast<Eigen::Index>(kGroupCount) * stride);
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    const auto hh = static_cast<Eigen::Index>(h);
    x.segment(hh * stride, d) = params.coefficients.row(hh).transpose();
    x[hh * stride + d] = params.intercepts[hh];
  }
  return x;
}

}  // namespace fairshift
