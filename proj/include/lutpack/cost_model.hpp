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

#include "lutpack/device.hpp"
#include "lutpack/strategy.hpp"

namespace lutpack {

// First-order time model for Output = W(MxK) . A(KxN). It accounts only for
// LUT traffic: slice streaming plus buffered lookups. Input, weight and
// output movement are deliberately excluded; the simulator reports those
// volumes separately but the planner never sees them.

/// Streaming time: 2^(b_w p) * ceil(K/p) * N * L_D + M * ceil(K/p) * N *
/// L_local. ceil(K/p) stands in for K/p so non-divisible K is defined.
double predict_slice_time(int p, std::int64_t m, std::int64_t k, std::int64_t n, int b_w,
                          const LatencyConstants& consts);

/// Buffer-resident time: M * ceil(K/p_local) * N * L_local.
double predict_local_time(int p_local, std::int64_t m, std::int64_t k, std::int64_t n,
                          const LatencyConstants& consts);

/// argmin over 1 <= p <= p_dram of (1/p) * (2^(b_w p) * L_D + M * L_local);
/// ties break toward the smaller p (less capacity at equal predicted time).
int select_p_star(std::int64_t m, int b_w, int p_dram, const LatencyConstants& consts);

struct PlacementDecision {
  Strategy strategy = Strategy::canonical_buffer;
  double threshold_m = 0.0;  // +inf when p_star <= p_local (no streaming benefit)
};

/// Buffer-resident wins when M < 2^(b_w p*) * (L_D / L_local) *
/// (p_local / (p* - p_local)); otherwise stream slices.
PlacementDecision placement_decision(std::int64_t m, int b_w, int p_star, int p_local,
                                     const LatencyConstants& consts);

struct PlanEntry {
  int p = 0;
  double slice_time_s = 0.0;
};

struct Plan {
  Strategy strategy = Strategy::canonical_buffer;  // canonical_buffer | slice_stream
  int p_star = 0;                 // argmin of the streaming objective over [1, p_dram]
  std::optional<int> p_local;     // largest buffer-resident p, when one exists
  int p_dram = 0;                 // largest bank-resident p
  int chosen_p = 0;               // p the selected strategy executes with
  double predicted_time_s = 0.0;
  double decision_threshold_m = 0.0;
  std::vector<PlanEntry> per_p;   // streaming time at every p in [1, p_dram]
};

/// Evaluates every p <= p_dram, picks p* and decides between a fully
/// buffer-resident canonical LUT and slice streaming. Capacity limits
/// (p_dram, p_local) come from the device's LUT budgets with canonicalized
/// tables plus the reordering LUT. Throws infeasible_p when nothing fits.
Plan make_plan(std::int64_t m, std::int64_t k, std::int64_t n, int b_w, int b_a, int b_o,
               const DeviceConfig& dev);

}  // namespace lutpack
