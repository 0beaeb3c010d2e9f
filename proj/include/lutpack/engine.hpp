/* lutpack
 * Copyright (c) 2026-present, the lutpack authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lutpack/codes.hpp"
#include "lutpack/cost_model.hpp"
#include "lutpack/device.hpp"
#include "lutpack/lut.hpp"
#include "lutpack/strategy.hpp"

namespace lutpack {

struct Int32Matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::int32_t> data;

  std::int32_t at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }
};

/// Per (ceil(K/p) x N) grid of canonicalized activation vectors: multiset rank
/// (canonical-LUT column) and permutation rank (reordering-LUT column) for
/// each group of p activations, tail groups padded with the zero code.
struct ActivationPlan {
  int p = 0;
  std::int64_t groups = 0;     // ceil(K / p)
  std::int64_t cols = 0;       // N
  std::int64_t pad_count = 0;  // zero-padded slots per column: groups*p - K
  std::vector<std::uint64_t> multiset_ranks;  // groups x cols, row-major
  std::vector<std::uint32_t> perm_ranks;

  std::uint64_t multiset_rank_at(std::int64_t g, std::int64_t n) const {
    return multiset_ranks[g * cols + n];
  }
  std::uint32_t perm_rank_at(std::int64_t g, std::int64_t n) const {
    return perm_ranks[g * cols + n];
  }
  /// Reconstructed canonical vector, mainly for inspection and tests.
  CanonVector at(std::int64_t g, std::int64_t n, int b_a) const;
  /// Sub-plan covering activation columns [col_begin, col_end).
  ActivationPlan slice_cols(std::int64_t col_begin, std::int64_t col_end) const;
};

/// Packed activation vectors per (group, column), zero-code padded past K;
/// the column indices used by the packed-LUT strategies. Layout [g*N + n].
std::vector<std::uint64_t> pack_activation_groups(const CodeMatrix& a, int p,
                                                  const CodeTable& act_table);

/// Event counters of one execution. Times derive from these counters alone.
struct ExecReport {
  Strategy strategy = Strategy::naive_mac;
  int p = 1;
  int k = 1;
  // (canonical entry + reordering entry) pairs streamed bank -> buffer
  std::uint64_t dram_entry_loads = 0;
  // (reordering lookup + canonical lookup + accumulate) triples in the buffer
  std::uint64_t local_lookups = 0;
  // scalar multiply-adds (naive baseline only)
  std::uint64_t mac_ops = 0;
  // direct accesses to a DRAM-resident packed LUT
  std::uint64_t dram_lut_lookups = 0;
  // weight-matrix passes (slice streaming: ceil(ceil(K/p)*N / k))
  std::uint64_t passes = 0;
  double modeled_time_s = 0.0;
};

struct ExecParams {
  Strategy strategy = Strategy::auto_select;
  int p = 0;    // packing degree; 0 lets auto_select take the planned p
  int k = 1;    // co-resident slices (slice streaming only)
  int b_o = 2;  // LUT entry width in bytes
};

struct ExecResult {
  Int32Matrix output;
  ExecReport report;
  std::optional<Plan> plan;  // present when strategy was auto_select
};

/// Exact integer GEMM through the decode tables; the correctness oracle every
/// strategy must match bit-for-bit.
Int32Matrix gemm_reference(const CodeMatrix& w, const CodeMatrix& a, const CodeTable& weight_table,
                           const CodeTable& act_table);

ActivationPlan build_activation_plan(const CodeMatrix& a, int p, const CodeTable& act_table);

/// LUTs for one (strategy, tables, p, b_o) point. Built once, immutable, and
/// safe to share across concurrently executing banks; the simulator builds a
/// bundle per run instead of one per bank, mirroring the broadcast of one LUT
/// image to every bank.
struct PreparedLuts {
  std::optional<PackedLut> packed;
  std::optional<CanonicalLut> canonical;
  std::optional<ReorderingLut> reordering;
};

PreparedLuts prepare_luts(Strategy strategy, const CodeTable& weight_table,
                          const CodeTable& act_table, int p, int b_o);

/// Host-side work that banks share: the broadcast LUT image plus the
/// activation-side preprocessing (canonicalized ranks or packed vectors) for
/// exactly the activation tile a bank receives.
struct ExecShared {
  const PreparedLuts* luts = nullptr;
  const ActivationPlan* act_plan = nullptr;                   // canonical strategies
  const std::vector<std::uint64_t>* packed_act_groups = nullptr;  // packed strategies
};

/// Runs the GEMM under the requested strategy. Output is bit-exact against
/// gemm_reference; the report's counters follow the per-strategy accounting
/// rules and its modeled time is counters x device constants. Anything
/// missing from `shared` is built locally; provided pieces must match the
/// operands and parameters.
ExecResult execute(const CodeMatrix& w, const CodeMatrix& a, const CodeTable& weight_table,
                   const CodeTable& act_table, const DeviceConfig& dev, const ExecParams& params,
                   const ExecShared* shared = nullptr);

/// Counter -> seconds conversion shared by the engine and the simulator.
double modeled_time(const ExecReport& report, const DeviceConfig& dev);

}  // namespace lutpack
