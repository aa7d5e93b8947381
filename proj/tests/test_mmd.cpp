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

#include <cmath>
#include <random>
#include <vector>

#include "fairshift/errors.hpp"
#include "fairshift/mmd.hpp"
#include "fairshift/synth.hpp"

using namespace fairshift;

namespace {

EncodedMatrix random_matrix(std::size_t rows, std::size_t cols,
                            std::uint32_t seed, double offset = 0.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(offset, 1.0);
  EncodedMatrix X(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) X(i, j) = normal(rng);
  }
  return X;
}

// From-definition double loops over all kernel evaluations.
double oracle_biased(const EncodedMatrix& X, const EncodedMatrix& V) {
  const auto m = X.rows(), n = V.rows();
  double xx = 0, vv = 0, xv = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) xx += X.row(i).dot(X.row(j));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) vv += V.row(i).dot(V.row(j));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) xv += X.row(i).dot(V.row(j));
  }
  return xx / double(m * m) + vv / double(n * n) - 2 * xv / double(m * n);
}

double oracle_unbiased(const EncodedMatrix& X, const EncodedMatrix& V) {
  const auto m = X.rows(), n = V.rows();
  double xx = 0, vv = 0, xv = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j) xx += X.row(i).dot(X.row(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) vv += V.row(i).dot(V.row(j));
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) xv += X.row(i).dot(V.row(j));
  }
  return xx / double(m * (m - 1)) + vv / double(n * (n - 1)) -
         2 * xv / double(m * n);
}

SynthSpec shifted_spec(std::vector<double> schedule, std::size_t rows,
                       std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.rows_per_context = rows;
  spec.numeric_features = 3;
  spec.shift_schedule = std::move(schedule);
  return spec;
}

}  // namespace

TEST_CASE("the one-dimensional hand case gives 1 biased, −1 unbiased") {
  EncodedMatrix X(2, 1), V(2, 1);
  X << 0, 2;
  V << 1, 3;
  CHECK(mmd2_biased(X, V) == doctest::Approx(1.0));
  CHECK(mmd2_unbiased(X, V) == doctest::Approx(-1.0));
}

TEST_CASE("the biased estimate is the squared mean gap") {
  EncodedMatrix X = random_matrix(37, 4, 1), V = random_matrix(22, 4, 2, 0.5);
  const double gap =
      (X.colwise().mean() - V.colwise().mean()).squaredNorm();
  CHECK(mmd2_biased(X, V) == doctest::Approx(gap).epsilon(1e-12));
  CHECK(mmd2_biased(X, V) >= 0.0);
  CHECK(mmd2_biased(X, X) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("both estimators match the double-loop definition") {
  std::mt19937 rng(77);
  for (int t = 0; t < 12; ++t) {
    const std::size_t m = 2 + rng() % 60, n = 2 + rng() % 60,
                      d = 1 + rng() % 6;
    EncodedMatrix X = random_matrix(m, d, 1000 + t);
    EncodedMatrix V = random_matrix(n, d, 2000 + t, 0.3);
    CHECK(mmd2_biased(X, V) ==
          doctest::Approx(oracle_biased(X, V)).scale(1.0).epsilon(1e-10));
    CHECK(mmd2_unbiased(X, V) ==
          doctest::Approx(oracle_unbiased(X, V)).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("scaling inputs by c scales the biased estimate by c squared") {
  EncodedMatrix X = random_matrix(20, 3, 5), V = random_matrix(25, 3, 6, 1.0);
  const double base = mmd2_biased(X, V);
  CHECK(mmd2_biased(2.5 * X, 2.5 * V) ==
        doctest::Approx(2.5 * 2.5 * base).epsilon(1e-10));
}

TEST_CASE("the unbiased estimator needs two rows per side") {
  EncodedMatrix one(1, 2), two(2, 2);
  one << 1, 2;
  two << 1, 2, 3, 4;
  CHECK_THROWS_AS(mmd2_unbiased(one, two), DataError);
  MmdResult r = mmd_pair(one, two);
  CHECK_FALSE(r.unbiased.has_value());
  CHECK(r.m == 1);
}

TEST_CASE("normalization maps the off-diagonal onto the unit interval") {
  Eigen::MatrixXd raw(3, 3);
  raw << 0, 2, 4, 2, 0, 6, 4, 6, 0;
  Eigen::MatrixXd norm = normalize_offdiagonal(raw);
  CHECK(norm(0, 1) == 0.0);
  CHECK(norm(0, 2) == 0.5);
  CHECK(norm(1, 2) == 1.0);
  CHECK(norm.diagonal().isZero());

  // Negative raw values still land in [0, 1].
  Eigen::MatrixXd neg(3, 3);
  neg << 0, -3, -1, -3, 0, 1, -1, 1, 0;
  Eigen::MatrixXd nn = normalize_offdiagonal(neg);
  CHECK(nn(0, 1) == 0.0);
  CHECK(nn(1, 2) == 1.0);
  CHECK(nn(0, 2) == 0.5);

  // A constant off-diagonal collapses to zero rather than dividing by zero.
  Eigen::MatrixXd flat(2, 2);
  flat << 0, 7, 7, 0;
  CHECK(normalize_offdiagonal(flat)(0, 1) == 0.0);
}

TEST_CASE("normalization preserves pairwise order") {
  std::mt19937 rng(9);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      raw(i, j) = raw(j, i) = std::uniform_real_distribution<>(0, 5)(rng);
    }
  }
  Eigen::MatrixXd norm = normalize_offdiagonal(raw);
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = c + 1; d < 4; ++d) {
          if (raw(a, b) < raw(c, d)) CHECK(norm(a, b) <= norm(c, d));
        }
      }
    }
  }
}

TEST_CASE("row sums add every off-diagonal entry in the row") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 2, 1, 0, 4, 2, 4, 0;
  std::vector<double> sums = mmd_row_sums(m);
  CHECK(sums == std::vector<double>{3.0, 5.0, 6.0});
}

TEST_CASE("pairwise distances are symmetric with a zero diagonal") {
  ContextCollection coll =
      generate_collection(shifted_spec({0.0, 0.6, 1.8}, 300, 5));
  SynthSpec spec = shifted_spec({0.0, 0.6, 1.8}, 300, 5);
  MmdMatrix m = pairwise_mmd(coll, synth_schema(spec));
  REQUIRE(m.ids.size() == 3);
  CHECK(m.raw.diagonal().isZero());
  CHECK((m.raw - m.raw.transpose()).norm() == 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) CHECK(m.raw(i, j) > 0.0);
    }
  }
}

TEST_CASE("larger distribution shifts read as larger distances") {
  SynthSpec spec = shifted_spec({0.0, 0.5, 2.5}, 800, 21);
  ContextCollection coll = generate_collection(spec);
  MmdMatrix m = pairwise_mmd(coll, synth_schema(spec));
  // C00 is unshifted: nearer to the mild shift than to the strong one.
  CHECK(m.raw(0, 1) < m.raw(0, 2));
  // The strongly shifted context accumulates the largest row sum.
  CHECK(m.row_sums_normalized[2] > m.row_sums_normalized[0]);
  CHECK(m.row_sums_normalized[2] > m.row_sums_normalized[1]);
  CHECK(m.row_sums_raw[2] > m.row_sums_raw[0]);
}

TEST_CASE("identical contexts sit at normalized distance zero") {
  SynthSpec spec = shifted_spec({0.0, 0.0, 3.0}, 500, 33);
  ContextCollection coll = generate_collection(spec);
  MmdMatrix m = pairwise_mmd(coll, synth_schema(spec));
  // Same generating distribution: tiny raw distance, mapped to the floor.
  CHECK(m.normalized(0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
  CHECK(m.normalized(0, 2) > 0.9);
}

TEST_CASE("a single-context collection cannot form a distance matrix") {
  SynthSpec spec = shifted_spec({0.0}, 50, 2);
  ContextCollection coll = generate_collection(spec);
  CHECK_THROWS_AS(pairwise_mmd(coll, synth_schema(spec)), DataError);
}

TEST_CASE("shifted contexts sit farther from the pooled distribution") {
  SynthSpec spec = shifted_spec({0.0, 0.1, 2.0}, 600, 44);
  ContextCollection coll = generate_collection(spec);
  Dataset global = build_global(coll, {});
  GlobalLocalMmd gl = global_local_mmd(global, coll, synth_schema(spec));
  REQUIRE(gl.ids.size() == 3);
  CHECK(gl.raw[2] > gl.raw[0]);
  CHECK(gl.raw[2] > gl.raw[1]);
  CHECK(gl.normalized[2] == 1.0);
  for (double v : gl.normalized) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("subsampling a context barely moves its biased estimate") {
  EncodedMatrix X = random_matrix(4000, 3, 50);
  EncodedMatrix V = random_matrix(4000, 3, 51, 0.8);
  const double full = mmd2_biased(X, V);
  const double half = mmd2_biased(X.topRows(2000), V.topRows(2000));
  CHECK(half == doctest::Approx(full).epsilon(0.15).scale(0.1));
}
