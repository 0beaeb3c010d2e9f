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

#include "lutpack/device.hpp"

#include <cmath>

#include "lutpack/lut.hpp"

namespace lutpack {

void validate_device(const DeviceConfig& dev) {
  if (dev.bank_bytes == 0 || dev.buffer_bytes == 0) {
    throw_error(errc::invalid_argument, "bank and buffer capacities must be positive");
  }
  if (!(dev.lut_budget_fraction > 0.0) || dev.lut_budget_fraction > 1.0) {
    throw_error(errc::invalid_argument, "lut_budget_fraction must be in (0, 1]");
  }
  if (dev.num_banks < 1) {
    throw_error(errc::invalid_argument, "num_banks must be >= 1");
  }
  if (!(dev.latency.l_d_seconds > 0.0) || !(dev.latency.l_local_seconds > 0.0) ||
      !(dev.dram_lookup_seconds > 0.0) || !(dev.mac_seconds > 0.0)) {
    throw_error(errc::invalid_argument, "latency constants must be positive");
  }
  if (!(dev.packed_buffer_lookup_fraction > 0.0)) {
    throw_error(errc::invalid_argument, "packed_buffer_lookup_fraction must be positive");
  }
}

namespace {

std::uint64_t scaled(std::uint64_t bytes, double fraction) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(bytes) * fraction));
}

}  // namespace

std::uint64_t bank_lut_budget(const DeviceConfig& dev) {
  return scaled(dev.bank_bytes, dev.lut_budget_fraction);
}

std::uint64_t buffer_lut_budget(const DeviceConfig& dev) {
  return scaled(dev.buffer_bytes, dev.lut_budget_fraction);
}

std::uint64_t bank_data_budget(const DeviceConfig& dev) {
  return dev.bank_bytes - bank_lut_budget(dev);
}

std::uint64_t buffer_data_budget(const DeviceConfig& dev) {
  return dev.buffer_bytes - buffer_lut_budget(dev);
}

std::optional<int> max_feasible_p(std::uint64_t tier_budget_bytes, int b_w, int b_a, int b_o,
                                  bool canonicalized, bool include_reordering) {
  std::optional<int> best;
  for (int p = 1;; ++p) {
    // Stop at build limits: packed indices must fit one 64-bit word, and a
    // reordering LUT is only constructible up to p = 8.
    if (canonicalized) {
      if (p * b_w > 64) break;
      if (include_reordering && p > 8) break;
    } else if (p * (b_w + b_a) > 64) {
      break;
    }
    const SizeReport sizes = compute_sizes(b_w, b_a, p, b_o);
    std::uint64_t bytes = 0;
    if (canonicalized) {
      bytes = sizes.canonical_bytes;
      if (include_reordering) {
        if (bytes > UINT64_MAX - sizes.reordering_bytes) {
          break;  // saturated; certainly over any budget
        }
        bytes += sizes.reordering_bytes;
      }
    } else {
      bytes = sizes.packed_bytes;
    }
    // Sizes grow monotonically in p, so the first overflow ends the search.
    if (bytes > tier_budget_bytes) break;
    best = p;
  }
  return best;
}

}  // namespace lutpack
