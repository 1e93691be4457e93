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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qnum/kernels/kernels.hpp"
#include "test_util.hpp"

namespace qnum {
namespace {

using testing::Gen;

const kernels::KernelTable* Vector() { return kernels::Avx2Table(); }

TEST(Kernels, ActiveTableIsKnown) {
  const auto name = kernels::Active().name;
  EXPECT_TRUE(name == "scalar" || name == "avx2") << name;
  const auto& prev = kernels::SetActive(kernels::ScalarTable());
  EXPECT_EQ(kernels::Active().name, "scalar");
  kernels::SetActive(prev);
  EXPECT_EQ(kernels::Active().name, name);
}

TEST(Kernels, ScalarGemvByHand) {
  const double m[6] = {1, 2, 3, 4, 5, 6};
  const double x[3] = {1, -1, 2};
  double y[2];
  kernels::ScalarTable().gemv(m, 2, 3, x, y);
  EXPECT_EQ(y[0], 5.0);
  EXPECT_EQ(y[1], 11.0);
  EXPECT_EQ(kernels::ScalarTable().sum_squares(x, 3), 6.0);
}

TEST(Kernels, GemvEquivalence) {
  if (Vector() == nullptr) GTEST_SKIP() << "no AVX2 on this host";
  Gen g(61);
  for (int t = 0; t < 300; ++t) {
    const auto rows = static_cast<std::size_t>(g.Int(1, 20));
    const auto cols = static_cast<std::size_t>(g.Int(1, 37));
    std::vector<double> m(rows * cols), x(cols), ys(rows), yv(rows);
    for (auto& v : m) v = g.Uniform(-3, 3);
    for (auto& v : x) v = g.Uniform(-3, 3);
    kernels::ScalarTable().gemv(m.data(), rows, cols, x.data(), ys.data());
    Vector()->gemv(m.data(), rows, cols, x.data(), yv.data());
    for (std::size_t r = 0; r < rows; ++r) {
      double mag = 0.0;
      for (std::size_t c = 0; c < cols; ++c) mag += std::fabs(m[r * cols + c] * x[c]);
      EXPECT_NEAR(ys[r], yv[r], 1e-14 * mag + 1e-300);
    }
  }
}

TEST(Kernels, SumSquaresEquivalence) {
  if (Vector() == nullptr) GTEST_SKIP() << "no AVX2 on this host";
  Gen g(62);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(static_cast<std::size_t>(g.Int(0, 50)));
    for (auto& e : v) e = g.Uniform(-5, 5);
    const double s = kernels::ScalarTable().sum_squares(v.data(), v.size());
    EXPECT_NEAR(s, Vector()->sum_squares(v.data(), v.size()), 1e-14 * s);
  }
}

TEST(Kernels, CountLineIdentical) {
  if (Vector() == nullptr) GTEST_SKIP() << "no AVX2 on this host";
  Gen g(63);
  for (int t = 0; t < 2000; ++t) {
    const auto rows = static_cast<std::size_t>(g.Int(1, 6));
    std::vector<double> base(rows), column(rows), bound(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      base[r] = g.Uniform(-3, 3);
      column[r] = g.Uniform(-1, 1);
      bound[r] = g.Uniform(0.5, 4);
    }
    // Exact ties: base + j * column lands on the bound for some j.
    if (t % 5 == 0) {
      column[0] = 0.5;
      base[0] = 0.0;
      bound[0] = 2.0;
    }
    kernels::LineQuery q{base.data(), column.data(), bound.data(), rows,
                         g.Int(-20, 0), g.Int(-5, 25)};
    EXPECT_EQ(kernels::ScalarTable().count_line(q), Vector()->count_line(q));
  }
}

TEST(Kernels, CountLineByHand) {
  const double base[1] = {0.0};
  const double column[1] = {0.5};
  const double bound[1] = {1.0};
  // |0.5 j| <= 1 for j in [-2, 2].
  kernels::LineQuery q{base, column, bound, 1, -10, 10};
  EXPECT_EQ(kernels::ScalarTable().count_line(q), 5u);
  q.j_lo = 3;
  q.j_hi = 2;
  EXPECT_EQ(kernels::ScalarTable().count_line(q), 0u);
}

}  // namespace
}  // namespace qnum
