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

#include <cmath>

#include "qnum/kernels/kernels.hpp"

namespace qnum::kernels {
namespace {

void GemvScalar(const double* m, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

double SumSquaresScalar(const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
  return acc;
}

std::uint64_t CountLineScalar(const LineQuery& q) {
  std::uint64_t count = 0;
  for (std::int64_t j = q.j_lo; j <= q.j_hi; ++j) {
    const double jd = static_cast<double>(j);
    bool inside = true;
    for (std::size_t r = 0; r < q.rows && inside; ++r) {
      const double v = q.base[r] + jd * q.column[r];
      inside = std::fabs(v) <= q.bound[r];
    }
    count += inside ? 1 : 0;
  }
  return count;
}

}  // namespace

const KernelTable& ScalarTable() {
  static const KernelTable table{"scalar", &GemvScalar, &SumSquaresScalar,
                                 &CountLineScalar};
  return table;
}

}  // namespace qnum::kernels
