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

// Data-parallel inner loops used by the PD iteration, the Monte Carlo
// accumulators and the lattice enumerator. Each kernel has a portable scalar
// reference and optional ISA-specific variants; one table is selected at
// process start from CPUID (override with QNUM_KERNELS=scalar|avx2).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qnum::kernels {

// One run of the innermost lattice axis: count integers j in [j_lo, j_hi]
// such that |base[r] + j * column[r]| <= bound[r] for every row r.
struct LineQuery {
  const double* base = nullptr;
  const double* column = nullptr;
  const double* bound = nullptr;
  std::size_t rows = 0;
  std::int64_t j_lo = 0;
  std::int64_t j_hi = -1;
};

struct KernelTable {
  std::string_view name;
  // y = M x for a row-major rows x cols matrix.
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  double (*sum_squares)(const double* v, std::size_t n);
  std::uint64_t (*count_line)(const LineQuery& q);
};

const KernelTable& ScalarTable();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* Avx2Table();

// The table chosen for this process.
const KernelTable& Active();

// Swap the active table, e.g. to pin the scalar reference in a test.
// Returns the previously active table.
const KernelTable& SetActive(const KernelTable& table);

inline void Gemv(std::span<const double> m, std::size_t rows,
                 std::size_t cols, std::span<const double> x,
                 std::span<double> y) {
  Active().gemv(m.data(), rows, cols, x.data(), y.data());
}

inline double SumSquares(std::span<const double> v) {
  return Active().sum_squares(v.data(), v.size());
}

inline std::uint64_t CountLine(const LineQuery& q) {
  return Active().count_line(q);
}

}  // namespace qnum::kernels
