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

#include "qnum/instance.hpp"

#include <cmath>
#include <string>

#include "qnum/error.hpp"
#include "qnum/pd.hpp"
#include "qnum/rng.hpp"

namespace qnum {
namespace {

// Keeps instance streams apart from trial streams that share a seed.
constexpr std::uint64_t kInstanceSalt = 0x51a7e6c0ffee1234ULL;

NumProblem Draw(const InstanceSpec& spec, CounterRng& rng) {
  const auto m = static_cast<Eigen::Index>(spec.num_agents);
  const auto n = static_cast<Eigen::Index>(spec.num_constraints);
  NumProblem p;
  p.utilities.reserve(spec.num_agents);
  for (Eigen::Index i = 0; i < m; ++i) {
    QuadraticUtility q;
    q.a = rng.Uniform(spec.a_lo, spec.a_hi);
    q.c = rng.Uniform(-spec.c_range, spec.c_range);
    p.utilities.emplace_back(q);
  }
  p.a_matrix.resize(n, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) p.a_matrix(j, i) = rng.Uniform(-1.0, 1.0);
    const double norm = p.a_matrix.row(j).norm();
    const double target = rng.Uniform(spec.row_norm_lo, spec.row_norm_hi);
    if (norm > 0.0) p.a_matrix.row(j) *= target / norm;
  }
  p.b.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) p.b(j) = rng.Uniform(-spec.b_range, spec.b_range);
  return p;
}

}  // namespace

GeneratedInstance GenerateInstance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.num_constraints < 1 || spec.num_constraints >= spec.num_agents) {
    throw Error(ErrorKind::kParam, "instance needs 1 <= N < M");
  }
  if (!(spec.a_lo > 0.0) || spec.a_hi < spec.a_lo || spec.row_norm_lo < 0.0 ||
      spec.row_norm_hi < spec.row_norm_lo || spec.c_range < 0.0 ||
      spec.b_range < 0.0 || spec.max_attempts < 1) {
    throw Error(ErrorKind::kParam, "inconsistent instance ranges");
  }
  if (!(spec.mu > 0.0) || spec.mu * spec.a_hi > 1.0) {
    throw Error(ErrorKind::kParam, "mu must lie in (0, 1/a_hi]");
  }
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    CounterRng rng(seed ^ kInstanceSalt, static_cast<std::uint64_t>(attempt));
    NumProblem p = Draw(spec, rng);
    try {
      const ValidatedProblem v = Validate(p);
      const double rho = SpectralRadius(BuildTMatrix(v, spec.mu).entries);
      if (rho <= spec.rho_max) return {std::move(p), rho, attempt + 1};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kRank) throw;
    }
  }
  throw Error(ErrorKind::kNotContractive,
              "no instance with rho(T) <= " + std::to_string(spec.rho_max) +
                  " in " + std::to_string(spec.max_attempts) + " draws");
}

}  // namespace qnum
