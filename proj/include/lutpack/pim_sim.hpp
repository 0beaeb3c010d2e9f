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
#include <vector>

#include "lutpack/engine.hpp"

namespace lutpack {

struct BankTile {
  int bank_id = 0;
  std::int64_t row_begin = 0;
  std::int64_t row_end = 0;
  std::int64_t col_begin = 0;
  std::int64_t col_end = 0;

  std::int64_t rows() const { return row_end - row_begin; }
  std::int64_t cols() const { return col_end - col_begin; }
};

/// Partition of the output across banks. M splits first (weights stay
/// resident per bank), N splits across whatever banks remain; LUTs are
/// replicated into every bank and charged against each bank's budget.
struct TilingPlan {
  int banks_m = 1;
  int banks_n = 1;
  std::int64_t m = 0, k = 0, n = 0;
  ExecParams params;
  std::vector<BankTile> tiles;
};

struct TilingOptions {
  bool split_n = true;
  // Minimum rows per bank tile (m_min): M splits across
  // min(num_banks, ceil(M / m_min)) banks, the rest go to N. Raising it
  // preserves per-bank slice reuse at the cost of row parallelism.
  std::int64_t min_rows_per_bank = 1;
};

/// Bytes resident per tier for one bank tile: replicated LUTs against the LUT
/// budgets, matrix tiles and the streaming working set against the data
/// budgets.
struct ResidencyBytes {
  std::uint64_t bank_lut = 0;
  std::uint64_t bank_data = 0;
  std::uint64_t buffer_lut = 0;
  std::uint64_t buffer_data = 0;
};

ResidencyBytes tile_residency(std::int64_t tile_m, std::int64_t k, std::int64_t tile_n, int b_w,
                              int b_a, const ExecParams& params);

/// Builds the default partition and verifies that the largest tile fits every
/// tier budget; throws CapacityError with the exact deficit otherwise.
TilingPlan plan_tiling(std::int64_t m, std::int64_t k, std::int64_t n, int b_w, int b_a,
                       const ExecParams& params, const DeviceConfig& dev,
                       const TilingOptions& opts = {});

struct TierUtilization {
  double bank_lut = 0.0;
  double bank_data = 0.0;
  double buffer_lut = 0.0;
  double buffer_data = 0.0;
};

struct SimReport {
  std::vector<ExecReport> per_bank;  // ordered by bank id
  ExecReport aggregate;              // counter sums over banks
  double wall_time_s = 0.0;          // max over banks; banks run concurrently
  TierUtilization utilization;       // worst-case bank, fraction of each budget
};

struct SimResult {
  Int32Matrix output;
  SimReport report;
};

/// Executes each bank tile through the engine, stitches the outputs
/// bit-exactly and converts per-bank counters into modeled time.
SimResult simulate(const TilingPlan& plan, const CodeMatrix& w, const CodeMatrix& a,
                   const CodeTable& weight_table, const CodeTable& act_table,
                   const DeviceConfig& dev);

}  // namespace lutpack
