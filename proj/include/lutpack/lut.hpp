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
#include <span>
#include <vector>

#include "lutpack/codes.hpp"
#include "lutpack/errors.hpp"
#include "lutpack/ranking.hpp"

namespace lutpack {

/// Entries can be stored row-major (natural build order, weight index as the
/// row) or column-major (slice extraction becomes a contiguous copy). The
/// serialized file records which order the payload uses.
enum class LutLayout : std::uint8_t { row_major = 0, column_major = 1 };

/// Table indexed by (packed weight vector, packed activation vector) holding
/// the p-term inner product of the decoded values.
struct PackedLut {
  int p = 0;
  int b_w = 0;
  int b_a = 0;
  int b_o = 0;  // serialized entry width in bytes (1, 2 or 4)
  std::uint64_t rows = 0;  // 2^(b_w * p)
  std::uint64_t cols = 0;  // 2^(b_a * p)
  LutLayout layout = LutLayout::row_major;
  CodeTable weight_table;
  CodeTable act_table;
  std::vector<std::int32_t> entries;

  std::int32_t entry(std::uint64_t r, std::uint64_t c) const {
    return layout == LutLayout::row_major ? entries[r * cols + c] : entries[c * rows + r];
  }
  void set_layout(LutLayout target);
  std::span<const std::int32_t> column(std::uint64_t c) const;
};

/// Packed LUT with activation columns deduplicated to one representative per
/// multiset of activation codes; columns are indexed by multiset rank.
struct CanonicalLut {
  int p = 0;
  int b_w = 0;
  int b_a = 0;
  int b_o = 0;
  std::uint64_t rows = 0;  // 2^(b_w * p)
  std::uint64_t cols = 0;  // C(2^b_a + p - 1, p)
  LutLayout layout = LutLayout::row_major;
  CodeTable weight_table;
  CodeTable act_table;
  std::vector<std::int32_t> entries;

  std::int32_t entry(std::uint64_t r, std::uint64_t c) const {
    return layout == LutLayout::row_major ? entries[r * cols + c] : entries[c * rows + r];
  }
  void set_layout(LutLayout target);
  std::span<const std::int32_t> column(std::uint64_t c) const;
};

/// Auxiliary table mapping (packed weight vector, permutation rank) to the
/// weight vector permuted into activation-sorted order. Independent of the
/// code tables: it shuffles codes, never values.
struct ReorderingLut {
  int p = 0;
  int b_w = 0;
  int entry_bytes = 0;  // ceil(p * b_w / 8), at least 1
  std::uint64_t rows = 0;  // 2^(b_w * p)
  std::uint64_t cols = 0;  // p!
  LutLayout layout = LutLayout::row_major;
  std::vector<std::uint64_t> entries;

  std::uint64_t entry(std::uint64_t r, std::uint64_t c) const {
    return layout == LutLayout::row_major ? entries[r * cols + c] : entries[c * rows + r];
  }
  void set_layout(LutLayout target);
  std::span<const std::uint64_t> column(std::uint64_t c) const;
};

struct SizeReport {
  int b_w = 0;
  int b_a = 0;
  int p = 0;
  int b_o = 0;
  int reordering_entry_bytes = 0;
  std::uint64_t canonical_cols = 0;
  std::uint64_t packed_bytes = 0;      // b_o * 2^((b_w + b_a) * p)
  std::uint64_t canonical_bytes = 0;   // b_o * 2^(b_w p) * C(2^b_a + p - 1, p)
  std::uint64_t reordering_bytes = 0;  // ceil(p b_w / 8) * 2^(b_w p) * p!
  double column_reduction = 0.0;       // 2^(p b_a) / canonical_cols
  double total_reduction = 0.0;        // packed / (canonical + reordering)
};

int reordering_entry_width(int b_w, int p);

/// Exact capacity requirements for the three table kinds at one (b_w, b_a, p,
/// b_o) point. Byte counts saturate at UINT64_MAX if a formula overflows;
/// the reduction ratios are always computed at full precision.
SizeReport compute_sizes(int b_w, int b_a, int p, int b_o);

PackedLut build_packed_lut(const CodeTable& weight_table, const CodeTable& act_table, int p,
                           int b_o);
CanonicalLut build_canonical_lut(const CodeTable& weight_table, const CodeTable& act_table, int p,
                                 int b_o);
ReorderingLut build_reordering_lut(int b_w, int p);

}  // namespace lutpack
