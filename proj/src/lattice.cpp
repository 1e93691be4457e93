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

#include "qnum/lattice.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "qnum/error.hpp"
#include "qnum/kernels/kernels.hpp"

namespace qnum {
namespace {

Eigen::MatrixXd Inverse(const Eigen::MatrixXd& t) {
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw Error(ErrorKind::kDimension, "T must be square and non-empty");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
  if (!lu.isInvertible()) throw Error(ErrorKind::kSingularT, "T is singular");
  return lu.inverse();
}

}  // namespace

double InfNorm(const Eigen::MatrixXd& t) {
  return t.cwiseAbs().rowwise().sum().maxCoeff();
}

BoxB BuildBox(const Eigen::MatrixXd& t, double rho) {
  if (!(rho >= 1.0)) throw Error(ErrorKind::kParam, "rho must be >= 1");
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw Error(ErrorKind::kParam, "T must be square and non-empty");
  }
  const double norm = InfNorm(t);
  BoxB box;
  box.sides = 4.0 * rho * t.diagonal().cwiseAbs().array() + 2.0 * norm;
  return box;
}

Eigen::VectorXd EnclosingSides(const Eigen::MatrixXd& t, const BoxB& box) {
  return Inverse(t).cwiseAbs() * box.sides;
}

double LogCountUpper(const Eigen::MatrixXd& t, const BoxB& box) {
  const Eigen::VectorXd l = EnclosingSides(t, box);
  double log_count = 0.0;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    log_count += std::log(std::floor(l(i)) + 1.0);
  }
  return log_count;
}

std::uint64_t CountUpper(const Eigen::MatrixXd& t, const BoxB& box) {
  const Eigen::VectorXd l = EnclosingSides(t, box);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    const auto factor = static_cast<std::uint64_t>(std::floor(l(i))) + 1;
    if (count > kMax / factor) return kMax;
    count *= factor;
  }
  return count;
}

LatticeCountResult CountExact(const Eigen::MatrixXd& t, const BoxB& box,
                              std::uint64_t budget, double rho) {
  const Eigen::MatrixXd inv = Inverse(t);
  const auto d = t.rows();
  if (box.sides.size() != d) {
    throw Error(ErrorKind::kDimension, "box and T differ in dimension");
  }

  LatticeCountResult result;
  result.rho = rho;
  result.upper = CountUpper(t, box);
  result.log_upper = LogCountUpper(t, box);

  // Integer range per axis covering T^-1(B) (with the same face slack).
  const Eigen::VectorXd half = 0.5 * (inv.cwiseAbs() * box.sides);
  std::vector<std::int64_t> lo(d), hi(d);
  double candidates = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double reach = half(i) * (1.0 + kLatticeBoundarySlack);
    hi[i] = static_cast<std::int64_t>(std::floor(reach));
    lo[i] = -hi[i];
    candidates *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (candidates > static_cast<double>(budget)) {
    result.budget_exceeded = true;
    return result;
  }

  std::vector<double> bound(d);
  for (Eigen::Index r = 0; r < d; ++r) {
    bound[r] = 0.5 * box.sides(r) + kLatticeBoundarySlack * box.sides(r);
  }
  // Row-major columns so the innermost axis can be fed to the line kernel.
  const Eigen::Index last = d - 1;
  std::vector<double> column(d), base(d);
  for (Eigen::Index r = 0; r < d; ++r) column[r] = t(r, last);

  std::vector<std::int64_t> idx(lo.begin(), lo.end());
  std::uint64_t count = 0;
  kernels::LineQuery q;
  q.base = base.data();
  q.column = column.data();
  q.bound = bound.data();
  q.rows = static_cast<std::size_t>(d);
  q.j_lo = lo[last];
  q.j_hi = hi[last];
  while (true) {
    for (Eigen::Index r = 0; r < d; ++r) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < last; ++c) {
        acc += t(r, c) * static_cast<double>(idx[c]);
      }
      base[r] = acc;
    }
    count += kernels::CountLine(q);

    // Odometer over the leading d-1 axes.
    Eigen::Index axis = last - 1;
    while (axis >= 0) {
      if (++idx[axis] <= hi[axis]) break;
      idx[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  result.exact = count;
  result.enumerated_points = static_cast<std::uint64_t>(candidates);
  return result;
}

}  // namespace qnum
