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

#include "qnum/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qnum/error.hpp"

namespace qnum {
namespace {

constexpr double kOffsetLimit = 4.0e18;

// Reconstruction slack: four ulps at the scale of the quantities involved.
double Slack(double a, double b, double c) {
  return 4.0 * std::numeric_limits<double>::epsilon() *
         std::max({std::fabs(a), std::fabs(b), std::fabs(c)});
}

std::int64_t FloorToInt(double v, std::int64_t k, const char* what) {
  const double f = std::floor(v);
  if (!std::isfinite(f) || std::fabs(f) > kOffsetLimit) {
    throw IntervalViolation(k, std::string(what) + " is not representable");
  }
  return static_cast<std::int64_t>(f);
}

}  // namespace

int CeilLog2(std::int64_t n) {
  if (n < 1) throw Error(ErrorKind::kParam, "alphabet size must be >= 1");
  int bits = 0;
  while ((std::int64_t{1} << bits) < n) ++bits;
  return bits;
}

CodecStream CodecStream::Passthrough() {
  CodecStream s;
  s.kind_ = CodecKind::kPassthrough;
  return s;
}

CodecStream CodecStream::Qa(QaParams params, double origin) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw Error(ErrorKind::kParam, "alpha must lie in (0, 1)");
  }
  if (params.levels < 1 || params.subdivision < 1) {
    throw Error(ErrorKind::kParam, "L and the subdivision factor must be >= 1");
  }
  if (!std::isfinite(origin)) throw Error(ErrorKind::kParam, "origin must be finite");
  CodecStream s;
  s.kind_ = CodecKind::kQa;
  s.qa_ = params;
  s.half_cells_ = static_cast<std::int64_t>(std::ceil(2.0 / params.alpha));
  s.origin_ = origin;
  return s;
}

CodecStream CodecStream::StaticUniform(double range, int bits) {
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw Error(ErrorKind::kParam, "static quantizer range must be positive");
  }
  if (bits < 1 || bits > 30) {
    throw Error(ErrorKind::kParam, "static quantizer bits must be in [1, 30]");
  }
  CodecStream s;
  s.kind_ = CodecKind::kStaticUniform;
  s.range_ = range;
  s.static_bits_ = bits;
  return s;
}

std::int64_t CodecStream::alphabet_size() const {
  switch (kind_) {
    case CodecKind::kPassthrough:
      return 0;
    case CodecKind::kStaticUniform:
      return std::int64_t{1} << static_bits_;
    case CodecKind::kQa:
      return k_ == 0 ? 2 * qa_.levels * std::int64_t{qa_.subdivision}
                     : 2 * half_cells_ * qa_.subdivision;
  }
  return 0;
}

double CodecStream::bits_per_symbol() const {
  if (kind_ == CodecKind::kPassthrough) {
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(CeilLog2(alphabet_size()));
}

double CodecStream::delta(std::int64_t k) const {
  return std::pow(qa_.alpha, static_cast<double>(k + 1));
}

Emission CodecStream::Encode(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kNumeric,
                "non-finite value at step " + std::to_string(k_));
  }
  const std::int64_t k = k_;
  Emission e;
  e.bits = bits_per_symbol();

  switch (kind_) {
    case CodecKind::kPassthrough:
      e.symbol.raw = value;
      break;

    case CodecKind::kStaticUniform: {
      const std::int64_t cells = std::int64_t{1} << static_bits_;
      const double width = 2.0 * range_ / static_cast<double>(cells);
      const double pos = std::clamp((value + range_) / width, -1.0,
                                    static_cast<double>(cells));
      e.symbol.cell = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor(pos)), 0, cells - 1);
      break;
    }

    case CodecKind::kQa: {
      const std::int64_t sub = qa_.subdivision;
      if (k == 0) {
        const std::int64_t lo = -qa_.levels * sub;
        const double pos = (value + origin_) * static_cast<double>(sub) / qa_.alpha;
        const double clamped = std::clamp(pos, static_cast<double>(lo) - 1.0,
                                          static_cast<double>(-lo));
        e.symbol.cell = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::floor(clamped)), lo, -lo - 1);
      } else {
        const double d_prev = delta(k - 1);
        const double d = delta(k);
        e.symbol.offset =
            FloorToInt((value - last_value_) / d_prev, k, "centre offset");
        e.carries_offset = true;
        const double centre =
            last_recon_ + static_cast<double>(e.symbol.offset) * d_prev;
        const double dev = value - centre;
        const double reach = static_cast<double>(half_cells_) * d;
        if (!(std::fabs(dev) <= reach + Slack(value, centre, reach))) {
          std::ostringstream msg;
          msg << std::setprecision(17) << "value " << value
              << " outside zoom interval centred at " << centre
              << " with half-width " << reach;
          throw IntervalViolation(k, msg.str());
        }
        const std::int64_t lo = -half_cells_ * sub;
        const double pos =
            std::clamp(dev / d * static_cast<double>(sub),
                       static_cast<double>(lo), static_cast<double>(-lo));
        e.symbol.cell = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::floor(pos)), lo, -lo - 1);
      }
      break;
    }
  }

  e.reconstruction = Decode(e.symbol);

  if (kind_ == CodecKind::kQa) {
    const double d = delta(k);
    const double err = std::fabs(value - e.reconstruction);
    if (!(err <= d + Slack(value, e.reconstruction, d))) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "reconstruction error " << err
          << " exceeds delta_k = " << d;
      throw IntervalViolation(k, msg.str());
    }
  }
  last_value_ = value;
  return e;
}

double CodecStream::Decode(const Symbol& symbol) {
  const std::int64_t k = k_;
  double recon = 0.0;
  switch (kind_) {
    case CodecKind::kPassthrough:
      recon = symbol.raw;
      break;

    case CodecKind::kStaticUniform: {
      const std::int64_t cells = std::int64_t{1} << static_bits_;
      if (symbol.cell < 0 || symbol.cell >= cells) {
        throw Error(ErrorKind::kDesync, "static cell index out of range");
      }
      const double width = 2.0 * range_ / static_cast<double>(cells);
      recon = -range_ + (static_cast<double>(symbol.cell) + 0.5) * width;
      break;
    }

    case CodecKind::kQa: {
      const std::int64_t sub = qa_.subdivision;
      if (k == 0) {
        const std::int64_t lo = -qa_.levels * sub;
        if (symbol.cell < lo || symbol.cell >= -lo || symbol.offset != 0) {
          throw Error(ErrorKind::kDesync, "initial cell index out of range");
        }
        const double width = qa_.alpha / static_cast<double>(sub);
        recon = (static_cast<double>(symbol.cell) + 0.5) * width - origin_;
      } else {
        const std::int64_t lo = -half_cells_ * sub;
        if (symbol.cell < lo || symbol.cell >= -lo) {
          throw Error(ErrorKind::kDesync,
                      "cell index out of range at step " + std::to_string(k));
        }
        const double d_prev = delta(k - 1);
        const double width = delta(k) / static_cast<double>(sub);
        const double centre =
            last_recon_ + static_cast<double>(symbol.offset) * d_prev;
        recon = centre + (static_cast<double>(symbol.cell) + 0.5) * width;
      }
      break;
    }
  }
  last_recon_ = recon;
  ++k_;
  return recon;
}

void SymbolTrace::Append(std::int64_t k, const Emission& e) {
  records_.push_back({k, e.symbol.offset, e.symbol.cell, e.bits});
}

void SymbolTrace::WriteCsv(std::ostream& out) const {
  out << "k,offset_integer,cell_index,bits\n";
  for (const auto& r : records_) {
    out << r.k << ',' << r.offset << ',' << r.cell << ',';
    if (std::isfinite(r.bits)) {
      out << r.bits;
    } else {
      out << "inf";
    }
    out << '\n';
  }
}

SymbolTrace SymbolTrace::ReadCsv(std::istream& in) {
  SymbolTrace trace;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line.rfind("k,offset_integer,cell_index,bits", 0) != 0) {
    throw ParseError(1, "missing symbol trace header");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(row, field, ',')) {
        throw ParseError(line_no, "expected 4 fields");
      }
    }
    try {
      TraceRecord r;
      r.k = std::stoll(f[0]);
      r.offset = std::stoll(f[1]);
      r.cell = std::stoll(f[2]);
      r.bits = f[3] == "inf" ? std::numeric_limits<double>::infinity()
                             : std::stod(f[3]);
      trace.records_.push_back(r);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed trace row '" + line + "'");
    }
  }
  return trace;
}

RateLedger::RateLedger(std::size_t num_agents, std::size_t num_constraints)
    : primal_(num_agents), dual_(num_constraints) {}

void RateLedger::Record(Side s, std::size_t index, std::int64_t k, double bits,
                        bool carries_offset) {
  auto& rows = side(s);
  if (index >= rows.size()) {
    throw Error(ErrorKind::kDimension, "ledger variable index out of range");
  }
  auto& row = rows[index];
  if (k != static_cast<std::int64_t>(row.size())) {
    throw Error(ErrorKind::kParam, "ledger steps must be recorded in order");
  }
  if (!(bits >= 0.0)) throw Error(ErrorKind::kParam, "bits must be >= 0");
  row.push_back(bits);
  auto& offsets = s == Side::kPrimal ? primal_offsets_ : dual_offsets_;
  if (offsets.size() <= static_cast<std::size_t>(k)) {
    offsets.resize(static_cast<std::size_t>(k) + 1, 0);
  }
  if (carries_offset) ++offsets[static_cast<std::size_t>(k)];
}

void RateLedger::NoteOffset(std::int64_t offset) {
  const std::int64_t mag = offset < 0 ? -offset : offset;
  offset_cap_ = std::max(offset_cap_, mag);
}

std::int64_t RateLedger::steps() const {
  std::int64_t n = std::numeric_limits<std::int64_t>::max();
  bool any = false;
  for (const auto* rows : {&primal_, &dual_}) {
    for (const auto& row : *rows) {
      n = std::min(n, static_cast<std::int64_t>(row.size()));
      any = true;
    }
  }
  return any ? n : 0;
}

int RateLedger::offset_bits() const { return CeilLog2(2 * offset_cap_ + 1); }

bool RateLedger::finite() const {
  for (const auto* rows : {&primal_, &dual_}) {
    for (const auto& row : *rows) {
      for (double b : row) {
        if (!std::isfinite(b)) return false;
      }
    }
  }
  return true;
}

double RateLedger::bits(Side s, std::size_t index, std::int64_t k) const {
  return side(s).at(index).at(static_cast<std::size_t>(k));
}

double RateLedger::StepBits(Side s, std::int64_t t, bool count_offset_bits) const {
  double total = 0.0;
  for (const auto& row : side(s)) total += row.at(static_cast<std::size_t>(t));
  if (count_offset_bits) {
    const auto& offsets = s == Side::kPrimal ? primal_offsets_ : dual_offsets_;
    if (static_cast<std::size_t>(t) < offsets.size()) {
      total += static_cast<double>(offsets[static_cast<std::size_t>(t)]) *
               offset_bits();
    }
  }
  return total;
}

double RateLedger::TotalBits(Side s, std::int64_t k_end,
                             bool count_offset_bits) const {
  double total = 0.0;
  for (std::int64_t t = 0; t < k_end; ++t) total += StepBits(s, t, count_offset_bits);
  return total;
}

double RateLedger::TotalNats(Side s, std::int64_t k_end,
                             bool count_offset_bits) const {
  return TotalBits(s, k_end, count_offset_bits) * std::log(2.0);
}

double RateSummary::r_x_bits() const { return r_x / std::log(2.0); }
double RateSummary::r_lambda_bits() const { return r_lambda / std::log(2.0); }
double RateSummary::r_q_bits() const { return r_q / std::log(2.0); }
bool RateSummary::finite() const {
  return std::isfinite(r_x) && std::isfinite(r_lambda) && std::isfinite(r_q);
}

RateSummary SummarizeRates(const RateLedger& ledger, std::int64_t horizon,
                           bool count_offset_bits) {
  if (horizon <= 0 || ledger.steps() == 0) {
    throw Error(ErrorKind::kEmptyLedger, "no recorded steps to average");
  }
  if (horizon > ledger.steps()) {
    throw Error(ErrorKind::kParam, "horizon " + std::to_string(horizon) +
                                       " exceeds the " +
                                       std::to_string(ledger.steps()) +
                                       " recorded steps");
  }
  RateSummary s;
  s.horizon = horizon;
  const double k = static_cast<double>(horizon);
  s.r_x = ledger.TotalNats(Side::kPrimal, horizon, count_offset_bits) / k;
  s.r_lambda = ledger.TotalNats(Side::kDual, horizon, count_offset_bits) / k;
  s.r_q = s.r_x + s.r_lambda;
  return s;
}

}  // namespace qnum
