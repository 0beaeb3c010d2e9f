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

#include "lutpack/lut.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "lutpack/detail/parallel.hpp"

namespace lutpack {

namespace {

// In-memory materialization cap; serialized LUTs at bank scale stay far below.
constexpr std::uint64_t kMaxMaterializedEntries = std::uint64_t{1} << 32;

void check_entry_width(int b_o) {
  if (b_o != 1 && b_o != 2 && b_o != 4) {
    throw_error(errc::invalid_argument,
                "entry width must be 1, 2 or 4 bytes, got " + std::to_string(b_o));
  }
}

void check_materializable(std::uint64_t rows, std::uint64_t cols, const char* what) {
  if (rows != 0 && cols > kMaxMaterializedEntries / rows) {
    throw CapacityError(std::string(what) + " in-memory entries",
                        std::numeric_limits<std::uint64_t>::max(), kMaxMaterializedEntries);
  }
}

/// Exact bounds of one p-term entry given the two decode tables. Each of the
/// p terms picks its product independently, so p * extreme is tight.
void entry_bounds(const CodeTable& wt, const CodeTable& at, int p, std::int64_t* lo,
                  std::int64_t* hi) {
  std::int64_t pmin = std::numeric_limits<std::int64_t>::max();
  std::int64_t pmax = std::numeric_limits<std::int64_t>::min();
  for (std::int32_t w : wt.values) {
    for (std::int32_t a : at.values) {
      const std::int64_t prod = static_cast<std::int64_t>(w) * a;
      pmin = std::min(pmin, prod);
      pmax = std::max(pmax, prod);
    }
  }
  *lo = pmin * p;
  *hi = pmax * p;
}

void check_entry_range(const CodeTable& wt, const CodeTable& at, int p, int b_o) {
  std::int64_t lo = 0, hi = 0;
  entry_bounds(wt, at, p, &lo, &hi);
  const std::int64_t limit_hi = (std::int64_t{1} << (8 * b_o - 1)) - 1;
  const std::int64_t limit_lo = -(std::int64_t{1} << (8 * b_o - 1));
  if (lo < limit_lo || hi > limit_hi) {
    throw_error(errc::entry_overflow, "entry range [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] does not fit signed " +
                                          std::to_string(b_o) + "-byte entries");
  }
}

template <typename T>
std::vector<T> transposed(const std::vector<T>& entries, std::uint64_t rows, std::uint64_t cols,
                          bool from_row_major) {
  std::vector<T> out(entries.size());
  const std::uint64_t src_rows = from_row_major ? rows : cols;
  const std::uint64_t src_cols = from_row_major ? cols : rows;
  for (std::uint64_t r = 0; r < src_rows; ++r) {
    for (std::uint64_t c = 0; c < src_cols; ++c) {
      out[c * src_rows + r] = entries[r * src_cols + c];
    }
  }
  return out;
}

}  // namespace

int reordering_entry_width(int b_w, int p) {
  return std::max(1, (p * b_w + 7) / 8);
}

SizeReport compute_sizes(int b_w, int b_a, int p, int b_o) {
  if (b_w < 1 || b_w > 8 || b_a < 1 || b_a > 8 || p < 1 || b_o < 1) {
    throw_error(errc::invalid_argument, "compute_sizes arguments out of range");
  }
  using u128 = unsigned __int128;
  const auto pow2 = [](int exp) -> u128 {
    u128 v = 1;
    for (int i = 0; i < exp; ++i) v *= 2;
    return v;
  };
  const auto saturate = [](u128 v) -> std::uint64_t {
    return v > std::numeric_limits<std::uint64_t>::max()
               ? std::numeric_limits<std::uint64_t>::max()
               : static_cast<std::uint64_t>(v);
  };

  SizeReport report;
  report.b_w = b_w;
  report.b_a = b_a;
  report.p = p;
  report.b_o = b_o;
  report.reordering_entry_bytes = reordering_entry_width(b_w, p);
  report.canonical_cols = multiset_count(p, 1u << b_a);

  const u128 packed = static_cast<u128>(b_o) * pow2((b_w + b_a) * p);
  const u128 weight_rows = pow2(b_w * p);
  const u128 canonical = static_cast<u128>(b_o) * weight_rows * report.canonical_cols;
  const u128 reordering = static_cast<u128>(report.reordering_entry_bytes) * weight_rows *
                          factorial(static_cast<std::uint32_t>(p));
  report.packed_bytes = saturate(packed);
  report.canonical_bytes = saturate(canonical);
  report.reordering_bytes = saturate(reordering);

  report.column_reduction = static_cast<double>(static_cast<long double>(pow2(b_a * p)) /
                                                static_cast<long double>(report.canonical_cols));
  report.total_reduction = static_cast<double>(static_cast<long double>(packed) /
                                               static_cast<long double>(canonical + reordering));
  return report;
}

void PackedLut::set_layout(LutLayout target) {
  if (target == layout) return;
  entries = transposed(entries, rows, cols, layout == LutLayout::row_major);
  layout = target;
}

std::span<const std::int32_t> PackedLut::column(std::uint64_t c) const {
  return std::span<const std::int32_t>(entries.data() + c * rows, rows);
}

void CanonicalLut::set_layout(LutLayout target) {
  if (target == layout) return;
  entries = transposed(entries, rows, cols, layout == LutLayout::row_major);
  layout = target;
}

std::span<const std::int32_t> CanonicalLut::column(std::uint64_t c) const {
  return std::span<const std::int32_t>(entries.data() + c * rows, rows);
}

void ReorderingLut::set_layout(LutLayout target) {
  if (target == layout) return;
  entries = transposed(entries, rows, cols, layout == LutLayout::row_major);
  layout = target;
}

std::span<const std::uint64_t> ReorderingLut::column(std::uint64_t c) const {
  return std::span<const std::uint64_t>(entries.data() + c * rows, rows);
}

PackedLut build_packed_lut(const CodeTable& weight_table, const CodeTable& act_table, int p,
                           int b_o) {
  check_entry_width(b_o);
  const int b_w = weight_table.bitwidth;
  const int b_a = act_table.bitwidth;
  if (p < 1) {
    throw_error(errc::invalid_argument, "p must be >= 1");
  }
  if (p * (b_w + b_a) > 64) {
    throw_error(errc::pack_too_wide, "p*(b_w+b_a) = " + std::to_string(p * (b_w + b_a)) +
                                         " exceeds the 64-bit packed index");
  }
  check_entry_range(weight_table, act_table, p, b_o);

  PackedLut lut;
  lut.p = p;
  lut.b_w = b_w;
  lut.b_a = b_a;
  lut.b_o = b_o;
  lut.rows = std::uint64_t{1} << (b_w * p);
  lut.cols = std::uint64_t{1} << (b_a * p);
  lut.weight_table = weight_table;
  lut.act_table = act_table;
  check_materializable(lut.rows, lut.cols, "packed LUT");
  lut.entries.resize(lut.rows * lut.cols);

  detail::parallel_for(static_cast<std::int64_t>(lut.rows), [&](std::int64_t r) {
    std::uint8_t wcodes[64];
    std::uint8_t acodes[64];
    unpack_bits(static_cast<std::uint64_t>(r), p, b_w, wcodes);
    std::int32_t wvals[64];
    for (int i = 0; i < p; ++i) wvals[i] = weight_table.values[wcodes[i]];
    std::int32_t* row = lut.entries.data() + static_cast<std::uint64_t>(r) * lut.cols;
    for (std::uint64_t c = 0; c < lut.cols; ++c) {
      unpack_bits(c, p, b_a, acodes);
      std::int64_t acc = 0;
      for (int i = 0; i < p; ++i) {
        acc += static_cast<std::int64_t>(wvals[i]) * act_table.values[acodes[i]];
      }
      row[c] = static_cast<std::int32_t>(acc);
    }
  });
  return lut;
}

CanonicalLut build_canonical_lut(const CodeTable& weight_table, const CodeTable& act_table, int p,
                                 int b_o) {
  check_entry_width(b_o);
  const int b_w = weight_table.bitwidth;
  const int b_a = act_table.bitwidth;
  if (p < 1) {
    throw_error(errc::invalid_argument, "p must be >= 1");
  }
  if (p * b_w > 64) {
    throw_error(errc::pack_too_wide,
                "p*b_w = " + std::to_string(p * b_w) + " exceeds the 64-bit packed index");
  }
  check_entry_range(weight_table, act_table, p, b_o);

  CanonicalLut lut;
  lut.p = p;
  lut.b_w = b_w;
  lut.b_a = b_a;
  lut.b_o = b_o;
  lut.rows = std::uint64_t{1} << (b_w * p);
  lut.cols = multiset_count(p, 1u << b_a);
  lut.weight_table = weight_table;
  lut.act_table = act_table;
  check_materializable(lut.rows, lut.cols, "canonical LUT");
  lut.entries.resize(lut.rows * lut.cols);

  // Decode every column's sorted activation values once.
  std::vector<std::int32_t> col_values(lut.cols * static_cast<std::uint64_t>(p));
  for (std::uint64_t c = 0; c < lut.cols; ++c) {
    const auto codes = multiset_unrank(c, p, 1u << b_a);
    for (int i = 0; i < p; ++i) {
      col_values[c * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(i)] =
          act_table.values[codes[static_cast<std::size_t>(i)]];
    }
  }

  detail::parallel_for(static_cast<std::int64_t>(lut.rows), [&](std::int64_t r) {
    std::uint8_t wcodes[64];
    unpack_bits(static_cast<std::uint64_t>(r), p, b_w, wcodes);
    std::int32_t wvals[64];
    for (int i = 0; i < p; ++i) wvals[i] = weight_table.values[wcodes[i]];
    std::int32_t* row = lut.entries.data() + static_cast<std::uint64_t>(r) * lut.cols;
    for (std::uint64_t c = 0; c < lut.cols; ++c) {
      const std::int32_t* avals = col_values.data() + c * static_cast<std::uint64_t>(p);
      std::int64_t acc = 0;
      for (int i = 0; i < p; ++i) {
        acc += static_cast<std::int64_t>(wvals[i]) * avals[i];
      }
      row[c] = static_cast<std::int32_t>(acc);
    }
  });
  return lut;
}

ReorderingLut build_reordering_lut(int b_w, int p) {
  if (b_w < 1 || b_w > 8) {
    throw_error(errc::invalid_argument, "b_w must be in [1, 8]");
  }
  if (p < 1 || p > 8) {
    throw_error(errc::p_too_large, "reordering LUT needs p in [1, 8], got " + std::to_string(p));
  }
  if (p * b_w > 64) {
    throw_error(errc::pack_too_wide,
                "p*b_w = " + std::to_string(p * b_w) + " exceeds the 64-bit packed index");
  }

  ReorderingLut lut;
  lut.p = p;
  lut.b_w = b_w;
  lut.entry_bytes = reordering_entry_width(b_w, p);
  lut.rows = std::uint64_t{1} << (b_w * p);
  lut.cols = factorial(static_cast<std::uint32_t>(p));
  check_materializable(lut.rows, lut.cols, "reordering LUT");
  lut.entries.resize(lut.rows * lut.cols);

  std::vector<std::vector<int>> perms(lut.cols);
  for (std::uint64_t c = 0; c < lut.cols; ++c) perms[c] = perm_unrank(c, p);

  detail::parallel_for(static_cast<std::int64_t>(lut.rows), [&](std::int64_t r) {
    std::uint8_t codes[64];
    std::uint8_t reordered[64];
    unpack_bits(static_cast<std::uint64_t>(r), p, b_w, codes);
    std::uint64_t* row = lut.entries.data() + static_cast<std::uint64_t>(r) * lut.cols;
    for (std::uint64_t c = 0; c < lut.cols; ++c) {
      const auto& perm = perms[c];
      for (int i = 0; i < p; ++i) {
        reordered[i] = codes[perm[static_cast<std::size_t>(i)]];
      }
      row[c] = pack_bits(std::span<const std::uint8_t>(reordered, static_cast<std::size_t>(p)),
                         b_w);
    }
  });
  return lut;
}

}  // namespace lutpack
