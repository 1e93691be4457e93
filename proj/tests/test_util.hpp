// Copyright 2026 The qnum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Hand-rolled generators and independent oracles shared by the test binaries.
// The oracles deliberately avoid Eigen and the library's own solvers.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qnum/error.hpp"
#include "qnum/problem.hpp"

// Expects `stmt` to throw qnum::Error with the given kind.
#define EXPECT_QNUM_ERROR(stmt, error_kind)                                \
  do {                                                                     \
    bool thrown_ = false;                                                  \
    try {                                                                  \
      stmt;                                                                \
    } catch (const ::qnum::Error& e_) {                                    \
      thrown_ = true;                                                      \
      EXPECT_EQ(e_.kind(), error_kind) << e_.what();                       \
    }                                                                      \
    EXPECT_TRUE(thrown_) << "expected " << ::qnum::ErrorKindName(error_kind); \
  } while (0)

namespace qnum::testing {

// a = (1, 1), c = 0, A = [1 1], b = 2.
inline NumProblem TwoAgent() {
  NumProblem p;
  p.utilities = {QuadraticUtility{1.0, 0.0, 0.0}, QuadraticUtility{1.0, 0.0, 0.0}};
  p.a_matrix = Eigen::MatrixXd{{1.0, 1.0}};
  p.b = Eigen::VectorXd::Constant(1, 2.0);
  return p;
}

using Dense = std::vector<std::vector<double>>;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Random quadratic instance with a_i in [a_lo, a_hi] and A entries in
// [-scale, scale]. Full rank with probability one.
inline NumProblem RandomQuadratic(Gen& g, std::size_t m, std::size_t n,
                                  double a_lo = 0.5, double a_hi = 2.0,
                                  double scale = 1.0) {
  NumProblem p;
  for (std::size_t i = 0; i < m; ++i) {
    p.utilities.emplace_back(
        QuadraticUtility{g.Uniform(a_lo, a_hi), g.Uniform(-3, 3), g.Uniform(-1, 1)});
  }
  p.a_matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < p.a_matrix.rows(); ++j) {
    for (Eigen::Index i = 0; i < p.a_matrix.cols(); ++i) {
      p.a_matrix(j, i) = g.Uniform(-scale, scale);
    }
  }
  p.b.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < p.b.size(); ++j) p.b(j) = g.Uniform(-2, 2);
  return p;
}

// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> OracleSolve(Dense a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Gauss-Jordan inverse.
inline Dense OracleInverse(const Dense& a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    const std::vector<double> col = OracleSolve(a, e);
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

// KKT oracle for quadratic problems: returns [x; lambda].
inline std::vector<double> OracleKkt(const NumProblem& p) {
  const std::size_t m = p.num_agents();
  const std::size_t n = p.num_constraints();
  Dense k(m + n, std::vector<double>(m + n, 0.0));
  std::vector<double> rhs(m + n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& q = std::get<QuadraticUtility>(p.utilities[i]);
    k[i][i] = q.a;
    rhs[i] = q.c;
    for (std::size_t j = 0; j < n; ++j) {
      const double aji = p.a_matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      k[i][m + j] = aji;
      k[m + j][i] = aji;
    }
  }
  for (std::size_t j = 0; j < n; ++j) rhs[m + j] = p.b(static_cast<Eigen::Index>(j));
  return OracleSolve(k, rhs);
}

// Brute-force count of integer vectors I with |(T I)_r| <= side_r / 2 (plus
// the 1e-12 relative tolerance), scanning the box |I_i| <= radius_i.
inline std::uint64_t OracleLatticeCount(const Dense& t, const std::vector<double>& sides) {
  const std::size_t d = t.size();
  const Dense inv = OracleInverse(t);
  std::vector<long> radius(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += std::fabs(inv[i][j]) * sides[j];
    radius[i] = static_cast<long>(std::floor(0.5 * s)) + 1;
  }
  std::vector<long> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = -radius[i];
  std::uint64_t count = 0;
  for (;;) {
    bool inside = true;
    for (std::size_t r = 0; r < d && inside; ++r) {
      double v = 0.0;
      for (std::size_t c = 0; c < d; ++c) v += t[r][c] * static_cast<double>(idx[c]);
      inside = std::fabs(v) <= sides[r] / 2.0 + 1e-12 * sides[r];
    }
    if (inside) ++count;
    std::size_t ax = 0;
    while (ax < d && ++idx[ax] > radius[ax]) {
      idx[ax] = -radius[ax];
      ++ax;
    }
    if (ax == d) break;
  }
  return count;
}

}  // namespace qnum::testing
