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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "qnum/kernels/kernels.hpp"

namespace qnum::kernels {

#if defined(QNUM_HAVE_AVX2_TU)
const KernelTable* Avx2TableImpl();
#endif

namespace {

bool CpuHasAvx2() {
#if defined(QNUM_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& Detect() {
  const char* forced = std::getenv("QNUM_KERNELS");
  const std::string_view want = forced != nullptr ? forced : "";
  if (want == "scalar") return ScalarTable();
  if (const KernelTable* avx2 = Avx2Table(); avx2 != nullptr) return *avx2;
  return ScalarTable();
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{&Detect()};
  return slot;
}

}  // namespace

const KernelTable* Avx2Table() {
#if defined(QNUM_HAVE_AVX2_TU)
  static const bool supported = CpuHasAvx2();
  return supported ? Avx2TableImpl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Active() { return *Slot().load(std::memory_order_acquire); }

const KernelTable& SetActive(const KernelTable& table) {
  return *Slot().exchange(&table, std::memory_order_acq_rel);
}

}  // namespace qnum::kernels
