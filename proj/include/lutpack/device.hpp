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

#include "lutpack/errors.hpp"

namespace lutpack {

/// Profiled latency constants of the modeled device.
///   l_d_seconds     — per (canonical entry + reordering entry) pair streamed
///                     from the bank into the local buffer
///   l_local_seconds — per (reordering lookup + canonical lookup + accumulate)
///                     triple served from the buffer
struct LatencyConstants {
  double l_d_seconds = 1.36e-9;
  double l_local_seconds = 3.27e-8;
};

inline constexpr double kDefaultLDSeconds = 1.36e-9;
inline constexpr double kDefaultLLocalSeconds = 3.27e-8;

/// One bank = DRAM array + small local buffer + processing unit. A fixed
/// fraction of each tier is reserved for LUTs; the remainder holds matrix
/// tiles and working data.
struct DeviceConfig {
  std::uint64_t bank_bytes = 64ull << 20;
  std::uint64_t buffer_bytes = 64ull << 10;
  double lut_budget_fraction = 0.5;
  int num_banks = 2048;
  LatencyConstants latency;
  // Per-lookup cost of a DRAM-resident packed LUT. Not profiled anywhere;
  // defaults to 10x l_local, overridable in the config file.
  double dram_lookup_seconds = 10.0 * kDefaultLLocalSeconds;
  // Per-MAC cost of the no-LUT baseline (4 instructions out of the 12 that
  // make up one l_local). Only affects the naive baseline's modeled time.
  double mac_seconds = kDefaultLLocalSeconds / 3.0;
  // A packed-LUT buffer lookup skips the reordering access, so it is cheaper
  // than the canonical+reordering pair; the exact fraction is a config knob.
  double packed_buffer_lookup_fraction = 0.5;
};

void validate_device(const DeviceConfig& dev);

std::uint64_t bank_lut_budget(const DeviceConfig& dev);
std::uint64_t buffer_lut_budget(const DeviceConfig& dev);
std::uint64_t bank_data_budget(const DeviceConfig& dev);
std::uint64_t buffer_data_budget(const DeviceConfig& dev);

/// Largest p >= 1 whose LUTs fit the byte budget: canonical (+ reordering when
/// requested) bytes for canonicalized tables, packed bytes otherwise. The
/// search is additionally capped at build-feasible p (index packing must fit
/// 64 bits; a reordering LUT needs p <= 8), so a returned p is always
/// constructible. nullopt when even p = 1 does not fit.
std::optional<int> max_feasible_p(std::uint64_t tier_budget_bytes, int b_w, int b_a, int b_o,
                                  bool canonicalized, bool include_reordering);

}  // namespace lutpack
