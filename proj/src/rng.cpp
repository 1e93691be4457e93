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

#include "qnum/rng.hpp"

namespace qnum {

std::uint64_t HashCounter(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t h = Mix64(seed);
  h = Mix64(h ^ stream);
  return Mix64(h ^ (index * 0xd6e8feb86659fd93ULL));
}

double UniformUnit(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(HashCounter(seed, stream, index) >> 11) * 0x1.0p-53;
}

}  // namespace qnum
