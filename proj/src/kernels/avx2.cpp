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

#include <immintrin.h>

#include <cmath>

#include "qnum/kernels/kernels.hpp"

namespace qnum::kernels {

const KernelTable* Avx2TableImpl();

namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void GemvAvx2(const double* m, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  const std::size_t cols4 = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < cols4; c += 4) {
      acc = _mm256_add_pd(
          acc, _mm256_mul_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c)));
    }
    double tail = 0.0;
    for (std::size_t c = cols4; c < cols; ++c) tail += row[c] * x[c];
    y[r] = HorizontalSum(acc) + tail;
  }
}

double SumSquaresAvx2(const double* v, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d a = _mm256_loadu_pd(v + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(a, a));
  }
  double tail = 0.0;
  for (std::size_t i = n4; i < n; ++i) tail += v[i] * v[i];
  return HorizontalSum(acc) + tail;
}

// Four consecutive j per iteration; per-lane arithmetic is the same
// mul-then-add sequence as the scalar reference, so counts agree exactly.
std::uint64_t CountLineAvx2(const LineQuery& q) {
  std::uint64_t count = 0;
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d step = _mm256_set1_pd(4.0);
  std::int64_t j = q.j_lo;
  __m256d jv = _mm256_setr_pd(static_cast<double>(j), static_cast<double>(j + 1),
                              static_cast<double>(j + 2),
                              static_cast<double>(j + 3));
  for (; j + 3 <= q.j_hi; j += 4) {
    __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t r = 0; r < q.rows; ++r) {
      const __m256d v = _mm256_add_pd(
          _mm256_set1_pd(q.base[r]),
          _mm256_mul_pd(jv, _mm256_set1_pd(q.column[r])));
      const __m256d mag = _mm256_andnot_pd(sign_mask, v);
      inside = _mm256_and_pd(
          inside, _mm256_cmp_pd(mag, _mm256_set1_pd(q.bound[r]), _CMP_LE_OQ));
    }
    count += static_cast<std::uint64_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(inside))));
    jv = _mm256_add_pd(jv, step);
  }
  for (; j <= q.j_hi; ++j) {
    const double jd = static_cast<double>(j);
    bool ok = true;
    for (std::size_t r = 0; r < q.rows && ok; ++r) {
      ok = std::fabs(q.base[r] + jd * q.column[r]) <= q.bound[r];
    }
    count += ok ? 1 : 0;
  }
  return count;
}

}  // namespace

const KernelTable* Avx2TableImpl() {
  static const KernelTable table{"avx2", &GemvAvx2, &SumSquaresAvx2,
                                 &CountLineAvx2};
  return &table;
}

}  // namespace qnum::kernels
