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

// Per-variable codecs and bit accounting.
//
// A CodecStream is the state machine shared by one transmitter and all of its
// receivers. The transmitter calls Encode(); every receiver holds its own copy
// and calls Decode() on the emitted symbols. Encode() advances the sender's
// model of the receiver through the same Decode() path, so both sides stay in
// lockstep by construction.
//
// The zoom-in scheme (Qa) uses step delta_k = alpha^(k+1). At k = 0 it is a
// midpoint quantizer on (-L alpha, L alpha) with 2L cells of width alpha. For
// k >= 1 the sender first transmits
//
//   offset = floor((v_k - v_{k-1}) / delta_{k-1})
//
// from which the receivers form the centre C = Q_{k-1} + offset * delta_{k-1},
// and then the cell index floor((v_k - C) / delta_k), clamped to
// [-H, H-1] with H = ceil(2 / alpha). The reconstruction is
// C + (cell + 1/2) delta_k. An optional subdivision factor K splits each cell
// into K equal sub-cells (alphabet grows by K, reconstruction step delta_k/K).

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace qnum {

enum class CodecKind { kPassthrough, kQa, kStaticUniform };

struct QaParams {
  double alpha = 0.5;
  int levels = 1;       // L: initial support (-L alpha, L alpha)
  int subdivision = 1;  // K >= 1 sub-cells per zoom cell
};

struct Symbol {
  std::int64_t offset = 0;  // Qa centre offset (0 at k = 0)
  std::int64_t cell = 0;    // signed cell index for Qa, [0, 2^bits) for static
  double raw = 0.0;         // passthrough payload
};

struct Emission {
  Symbol symbol;
  double bits = 0.0;  // ceil(log2 |alphabet|); +inf for passthrough
  double reconstruction = 0.0;
  bool carries_offset = false;
};

class CodecStream {
 public:
  static CodecStream Passthrough();

  // Zoom-in stream. Values handed to Encode() are measured relative to
  // `origin`; the k = 0 grid stays anchored at absolute zero. Throws
  // Error{kParam} unless 0 < alpha < 1, L >= 1 and K >= 1.
  static CodecStream Qa(QaParams params, double origin = 0.0);

  // Fixed midpoint quantizer with 2^bits cells on [-range, range]; inputs
  // outside are clamped to the end cells.
  static CodecStream StaticUniform(double range, int bits);

  CodecKind kind() const { return kind_; }
  // Time index of the next symbol.
  std::int64_t step() const { return k_; }
  double reconstruction() const { return last_recon_; }
  const QaParams& qa_params() const { return qa_; }

  // |A_k| for the next symbol; 0 means unbounded (passthrough).
  std::int64_t alphabet_size() const;
  double bits_per_symbol() const;

  // Qa quantization step alpha^(k+1).
  double delta(std::int64_t k) const;
  // H = ceil(2 / alpha).
  std::int64_t half_cells() const { return half_cells_; }

  // Throws IntervalViolation if the value leaves the predicted interval or
  // the reconstruction misses it by more than delta_k.
  Emission Encode(double value);

  // Throws Error{kDesync} for a symbol outside the current alphabet.
  double Decode(const Symbol& symbol);

 private:
  CodecStream() = default;

  CodecKind kind_ = CodecKind::kPassthrough;
  QaParams qa_;
  std::int64_t half_cells_ = 0;
  double origin_ = 0.0;
  double range_ = 0.0;
  int static_bits_ = 0;

  std::int64_t k_ = 0;
  double last_recon_ = 0.0;
  double last_value_ = 0.0;  // sender side only
};

// ceil(log2(n)) for n >= 1.
int CeilLog2(std::int64_t n);

struct TraceRecord {
  std::int64_t k = 0;
  std::int64_t offset = 0;
  std::int64_t cell = 0;
  double bits = 0.0;
};

// Append-only per-variable log of emitted symbols; CSV columns
// `k,offset_integer,cell_index,bits`.
class SymbolTrace {
 public:
  void Append(std::int64_t k, const Emission& e);
  const std::vector<TraceRecord>& records() const { return records_; }

  void WriteCsv(std::ostream& out) const;
  static SymbolTrace ReadCsv(std::istream& in);

 private:
  std::vector<TraceRecord> records_;
};

enum class Side { kPrimal, kDual };

// Bits sent by each agent (primal side) and NN (dual side) at each step.
class RateLedger {
 public:
  RateLedger() = default;
  RateLedger(std::size_t num_agents, std::size_t num_constraints);

  // Steps must be recorded in order for each variable.
  void Record(Side side, std::size_t index, std::int64_t k, double bits,
              bool carries_offset = false);
  void NoteOffset(std::int64_t offset);

  std::size_t num_agents() const { return primal_.size(); }
  std::size_t num_constraints() const { return dual_.size(); }
  // Steps recorded for every variable.
  std::int64_t steps() const;
  std::int64_t offset_cap() const { return offset_cap_; }
  // ceil(log2(2 * cap + 1)).
  int offset_bits() const;
  bool finite() const;

  double bits(Side side, std::size_t index, std::int64_t k) const;
  // Sum over the side's variables at step t.
  double StepBits(Side side, std::int64_t t, bool count_offset_bits = false) const;
  // Sum over steps t < k_end of StepBits.
  double TotalBits(Side side, std::int64_t k_end, bool count_offset_bits = false) const;
  double TotalNats(Side side, std::int64_t k_end, bool count_offset_bits = false) const;

 private:
  const std::vector<std::vector<double>>& side(Side s) const {
    return s == Side::kPrimal ? primal_ : dual_;
  }
  std::vector<std::vector<double>>& side(Side s) {
    return s == Side::kPrimal ? primal_ : dual_;
  }

  std::vector<std::vector<double>> primal_;
  std::vector<std::vector<double>> dual_;
  // Number of offset-carrying symbols per step, per side.
  std::vector<std::int64_t> primal_offsets_;
  std::vector<std::int64_t> dual_offsets_;
  std::int64_t offset_cap_ = 0;
};

struct RateSummary {
  std::int64_t horizon = 0;
  double r_x = 0.0;       // nats per step
  double r_lambda = 0.0;  // nats per step
  double r_q = 0.0;       // nats per step

  double r_x_bits() const;
  double r_lambda_bits() const;
  double r_q_bits() const;
  bool finite() const;
};

// Finite-horizon averages (1/k) sum_{t<k} sum_i log|A_{i,t}|, charged at
// ceil(log2|A|) bits per symbol. Throws Error{kEmptyLedger} if the horizon
// is non-positive or the ledger holds no steps.
RateSummary SummarizeRates(const RateLedger& ledger, std::int64_t horizon,
                           bool count_offset_bits = false);

}  // namespace qnum
