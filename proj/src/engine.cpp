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

#include "lutpack/engine.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace lutpack {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_operands(const CodeMatrix& w, const CodeMatrix& a, const CodeTable& wt,
                    const CodeTable& at) {
  if (w.cols != a.rows) {
    throw_error(errc::dimension_mismatch, "W is " + std::to_string(w.rows) + "x" +
                                              std::to_string(w.cols) + " but A has " +
                                              std::to_string(a.rows) + " rows");
  }
  if (w.bitwidth != wt.bitwidth || a.bitwidth != at.bitwidth) {
    throw_error(errc::dimension_mismatch, "matrix bitwidths do not match the code tables");
  }
}

std::int32_t narrow_to_int32(std::int64_t acc) {
  if (acc < std::numeric_limits<std::int32_t>::min() ||
      acc > std::numeric_limits<std::int32_t>::max()) {
    throw_error(errc::accumulator_overflow,
                "output value " + std::to_string(acc) + " does not fit a signed 32-bit word");
  }
  return static_cast<std::int32_t>(acc);
}

Int32Matrix finalize(std::int64_t rows, std::int64_t cols, const std::vector<std::int64_t>& acc) {
  Int32Matrix out{rows, cols, std::vector<std::int32_t>(acc.size())};
  for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = narrow_to_int32(acc[i]);
  return out;
}

/// Weight vectors for group g, padded past K with code 0. The pad code's
/// value is irrelevant: the matching activation slot decodes to exactly 0.
std::vector<std::uint64_t> pack_weight_groups(const CodeMatrix& w, int p, std::int64_t groups) {
  std::vector<std::uint64_t> packed(static_cast<std::size_t>(w.rows * groups));
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(p), 0);
  for (std::int64_t m = 0; m < w.rows; ++m) {
    for (std::int64_t g = 0; g < groups; ++g) {
      for (int i = 0; i < p; ++i) {
        const std::int64_t col = g * p + i;
        codes[static_cast<std::size_t>(i)] = col < w.cols ? w.at(m, col) : std::uint8_t{0};
      }
      packed[static_cast<std::size_t>(m * groups + g)] = pack_bits(codes, w.bitwidth);
    }
  }
  return packed;
}

void check_strategy_p(Strategy strategy, int p, int b_w, int b_a) {
  if (p < 1) {
    throw_error(errc::infeasible_p, "p must be >= 1");
  }
  if (strategy == Strategy::packed_dram || strategy == Strategy::packed_buffer) {
    if (p * (b_w + b_a) > 64) {
      throw_error(errc::infeasible_p,
                  "p*(b_w+b_a) = " + std::to_string(p * (b_w + b_a)) + " exceeds 64 bits");
    }
  } else if (strategy == Strategy::canonical_buffer || strategy == Strategy::slice_stream) {
    if (p > 8) {
      throw_error(errc::infeasible_p, "canonicalized strategies need p <= 8");
    }
    if (p * b_w > 64 || p * b_a > 64) {
      throw_error(errc::infeasible_p, "packed vector width exceeds 64 bits");
    }
  }
}

}  // namespace

CanonVector ActivationPlan::at(std::int64_t g, std::int64_t n, int b_a) const {
  CanonVector v;
  v.multiset_rank = multiset_rank_at(g, n);
  v.perm_rank = perm_rank_at(g, n);
  v.sorted_codes = multiset_unrank(v.multiset_rank, p, 1u << b_a);
  return v;
}

ActivationPlan ActivationPlan::slice_cols(std::int64_t col_begin, std::int64_t col_end) const {
  if (col_begin < 0 || col_end < col_begin || col_end > cols) {
    throw_error(errc::invalid_argument, "column range outside the plan");
  }
  ActivationPlan out;
  out.p = p;
  out.groups = groups;
  out.cols = col_end - col_begin;
  out.pad_count = pad_count;
  out.multiset_ranks.resize(static_cast<std::size_t>(out.groups * out.cols));
  out.perm_ranks.resize(static_cast<std::size_t>(out.groups * out.cols));
  for (std::int64_t g = 0; g < groups; ++g) {
    const std::size_t src = static_cast<std::size_t>(g * cols + col_begin);
    const std::size_t dst = static_cast<std::size_t>(g * out.cols);
    std::copy_n(multiset_ranks.begin() + static_cast<std::ptrdiff_t>(src),
                out.cols, out.multiset_ranks.begin() + static_cast<std::ptrdiff_t>(dst));
    std::copy_n(perm_ranks.begin() + static_cast<std::ptrdiff_t>(src),
                out.cols, out.perm_ranks.begin() + static_cast<std::ptrdiff_t>(dst));
  }
  return out;
}

std::vector<std::uint64_t> pack_activation_groups(const CodeMatrix& a, int p,
                                                  const CodeTable& act_table) {
  if (p < 1) {
    throw_error(errc::invalid_argument, "p must be >= 1");
  }
  if (a.bitwidth != act_table.bitwidth) {
    throw_error(errc::dimension_mismatch, "activation bitwidth does not match the table");
  }
  const std::int64_t groups = a.rows == 0 ? 0 : (a.rows + p - 1) / p;
  const bool needs_pad = groups * p != a.rows;
  if (needs_pad && !act_table.zero_code) {
    throw_error(errc::no_zero_code,
                "K is not divisible by p and the activation table has no exact-zero code");
  }
  const std::uint8_t pad = needs_pad ? *act_table.zero_code : std::uint8_t{0};
  std::vector<std::uint64_t> packed(static_cast<std::size_t>(groups * a.cols));
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(p), 0);
  for (std::int64_t g = 0; g < groups; ++g) {
    for (std::int64_t n = 0; n < a.cols; ++n) {
      for (int i = 0; i < p; ++i) {
        const std::int64_t row = g * p + i;
        codes[static_cast<std::size_t>(i)] = row < a.rows ? a.at(row, n) : pad;
      }
      packed[static_cast<std::size_t>(g * a.cols + n)] = pack_bits(codes, a.bitwidth);
    }
  }
  return packed;
}

Int32Matrix gemm_reference(const CodeMatrix& w, const CodeMatrix& a, const CodeTable& weight_table,
                           const CodeTable& act_table) {
  check_operands(w, a, weight_table, act_table);
  std::vector<std::int64_t> acc(static_cast<std::size_t>(w.rows * a.cols), 0);
  for (std::int64_t m = 0; m < w.rows; ++m) {
    for (std::int64_t k = 0; k < w.cols; ++k) {
      const std::int64_t wv = weight_table.values[w.at(m, k)];
      if (wv == 0) continue;
      for (std::int64_t n = 0; n < a.cols; ++n) {
        acc[static_cast<std::size_t>(m * a.cols + n)] +=
            wv * static_cast<std::int64_t>(act_table.values[a.at(k, n)]);
      }
    }
  }
  return finalize(w.rows, a.cols, acc);
}

ActivationPlan build_activation_plan(const CodeMatrix& a, int p, const CodeTable& act_table) {
  if (p < 1) {
    throw_error(errc::invalid_argument, "p must be >= 1");
  }
  if (a.bitwidth != act_table.bitwidth) {
    throw_error(errc::dimension_mismatch, "activation bitwidth does not match the table");
  }
  ActivationPlan plan;
  plan.p = p;
  plan.groups = a.rows == 0 ? 0 : ceil_div(a.rows, p);
  plan.cols = a.cols;
  plan.pad_count = plan.groups * p - a.rows;
  if (plan.pad_count > 0 && !act_table.zero_code) {
    throw_error(errc::no_zero_code,
                "K is not divisible by p and the activation table has no exact-zero code");
  }
  const std::uint8_t pad = plan.pad_count > 0 ? *act_table.zero_code : std::uint8_t{0};

  plan.multiset_ranks.resize(static_cast<std::size_t>(plan.groups * plan.cols));
  plan.perm_ranks.resize(static_cast<std::size_t>(plan.groups * plan.cols));
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(p));
  for (std::int64_t g = 0; g < plan.groups; ++g) {
    for (std::int64_t n = 0; n < plan.cols; ++n) {
      for (int i = 0; i < p; ++i) {
        const std::int64_t row = g * p + i;
        codes[static_cast<std::size_t>(i)] = row < a.rows ? a.at(row, n) : pad;
      }
      const CanonVector canon = canonicalize(codes, a.bitwidth);
      plan.multiset_ranks[static_cast<std::size_t>(g * plan.cols + n)] = canon.multiset_rank;
      plan.perm_ranks[static_cast<std::size_t>(g * plan.cols + n)] =
          static_cast<std::uint32_t>(canon.perm_rank);
    }
  }
  return plan;
}

double modeled_time(const ExecReport& report, const DeviceConfig& dev) {
  const double local_latency = report.strategy == Strategy::packed_buffer
                                   ? dev.packed_buffer_lookup_fraction * dev.latency.l_local_seconds
                                   : dev.latency.l_local_seconds;
  return static_cast<double>(report.dram_entry_loads) * dev.latency.l_d_seconds +
         static_cast<double>(report.local_lookups) * local_latency +
         static_cast<double>(report.dram_lut_lookups) * dev.dram_lookup_seconds +
         static_cast<double>(report.mac_ops) * dev.mac_seconds;
}

PreparedLuts prepare_luts(Strategy strategy, const CodeTable& weight_table,
                          const CodeTable& act_table, int p, int b_o) {
  check_strategy_p(strategy, p, weight_table.bitwidth, act_table.bitwidth);
  PreparedLuts luts;
  switch (strategy) {
    case Strategy::packed_dram:
    case Strategy::packed_buffer:
      luts.packed = build_packed_lut(weight_table, act_table, p, b_o);
      break;
    case Strategy::canonical_buffer:
    case Strategy::slice_stream:
      luts.canonical = build_canonical_lut(weight_table, act_table, p, b_o);
      luts.reordering = build_reordering_lut(weight_table.bitwidth, p);
      if (strategy == Strategy::slice_stream) {
        // Column-major storage makes each streamed slice one contiguous copy.
        luts.canonical->set_layout(LutLayout::column_major);
        luts.reordering->set_layout(LutLayout::column_major);
      }
      break;
    case Strategy::naive_mac:
    case Strategy::auto_select:
      break;
  }
  return luts;
}

ExecResult execute(const CodeMatrix& w, const CodeMatrix& a, const CodeTable& weight_table,
                   const CodeTable& act_table, const DeviceConfig& dev, const ExecParams& params,
                   const ExecShared* shared) {
  check_operands(w, a, weight_table, act_table);
  validate_device(dev);

  ExecResult result;
  Strategy strategy = params.strategy;
  int p = params.p;
  const int k = params.k;
  const int b_o = params.b_o;

  if (strategy == Strategy::auto_select) {
    result.plan = make_plan(w.rows, w.cols, a.cols, weight_table.bitwidth, act_table.bitwidth,
                            b_o, dev);
    strategy = result.plan->strategy;
    p = result.plan->chosen_p;
  } else if (strategy == Strategy::naive_mac) {
    p = params.p > 0 ? params.p : 1;
  }

  ExecReport& report = result.report;
  report.strategy = strategy;
  report.p = p;
  report.k = k;

  const std::int64_t m_dim = w.rows;
  const std::int64_t k_dim = w.cols;
  const std::int64_t n_dim = a.cols;

  // Empty problems short-circuit: no LUTs, no events.
  if (m_dim == 0 || k_dim == 0 || n_dim == 0) {
    result.output = Int32Matrix{m_dim, n_dim,
                                std::vector<std::int32_t>(
                                    static_cast<std::size_t>(m_dim * n_dim), 0)};
    return result;
  }

  if (strategy == Strategy::naive_mac) {
    std::vector<std::int64_t> acc(static_cast<std::size_t>(m_dim * n_dim), 0);
    for (std::int64_t mm = 0; mm < m_dim; ++mm) {
      for (std::int64_t kk = 0; kk < k_dim; ++kk) {
        const std::int64_t wv = weight_table.values[w.at(mm, kk)];
        for (std::int64_t nn = 0; nn < n_dim; ++nn) {
          acc[static_cast<std::size_t>(mm * n_dim + nn)] +=
              wv * static_cast<std::int64_t>(act_table.values[a.at(kk, nn)]);
        }
      }
    }
    result.output = finalize(m_dim, n_dim, acc);
    report.mac_ops = static_cast<std::uint64_t>(m_dim) * static_cast<std::uint64_t>(k_dim) *
                     static_cast<std::uint64_t>(n_dim);
    report.passes = 1;
    report.modeled_time_s = modeled_time(report, dev);
    return result;
  }

  check_strategy_p(strategy, p, weight_table.bitwidth, act_table.bitwidth);
  const int b_w = weight_table.bitwidth;
  const std::int64_t groups = ceil_div(k_dim, p);
  const SizeReport sizes = compute_sizes(b_w, act_table.bitwidth, p, b_o);
  const std::uint64_t lookups = static_cast<std::uint64_t>(m_dim) *
                                static_cast<std::uint64_t>(groups) *
                                static_cast<std::uint64_t>(n_dim);
  std::vector<std::int64_t> acc(static_cast<std::size_t>(m_dim * n_dim), 0);

  const PreparedLuts* prebuilt = shared ? shared->luts : nullptr;
  const auto check_prebuilt = [&](int lut_p, int lut_b_o, LutLayout layout,
                                  LutLayout expected) {
    if (lut_p != p || lut_b_o != b_o || layout != expected) {
      throw_error(errc::invalid_argument, "prebuilt LUTs do not match the execution parameters");
    }
  };
  const auto resolve_plan = [&](std::optional<ActivationPlan>& local) -> const ActivationPlan& {
    if (shared && shared->act_plan) {
      const ActivationPlan& plan = *shared->act_plan;
      if (plan.p != p || plan.groups != groups || plan.cols != n_dim) {
        throw_error(errc::invalid_argument,
                    "shared activation plan does not match the operands");
      }
      return plan;
    }
    local = build_activation_plan(a, p, act_table);
    return *local;
  };
  const auto resolve_packed_acts =
      [&](std::optional<std::vector<std::uint64_t>>& local) -> const std::vector<std::uint64_t>& {
    if (shared && shared->packed_act_groups) {
      const auto& acts = *shared->packed_act_groups;
      if (acts.size() != static_cast<std::size_t>(groups * n_dim)) {
        throw_error(errc::invalid_argument,
                    "shared packed activations do not match the operands");
      }
      return acts;
    }
    local = pack_activation_groups(a, p, act_table);
    return *local;
  };

  if (strategy == Strategy::packed_dram || strategy == Strategy::packed_buffer) {
    if (strategy == Strategy::packed_dram) {
      if (sizes.packed_bytes > bank_lut_budget(dev)) {
        throw CapacityError("bank LUT budget", sizes.packed_bytes, bank_lut_budget(dev));
      }
    } else if (sizes.packed_bytes > buffer_lut_budget(dev)) {
      throw CapacityError("buffer LUT budget", sizes.packed_bytes, buffer_lut_budget(dev));
    }
    std::optional<PackedLut> local;
    if (!prebuilt || !prebuilt->packed) {
      local = build_packed_lut(weight_table, act_table, p, b_o);
    }
    const PackedLut& lut = local ? *local : *prebuilt->packed;
    check_prebuilt(lut.p, lut.b_o, lut.layout, LutLayout::row_major);
    const auto wrows = pack_weight_groups(w, p, groups);
    std::optional<std::vector<std::uint64_t>> local_acts;
    const std::vector<std::uint64_t>& acols = resolve_packed_acts(local_acts);
    for (std::int64_t mm = 0; mm < m_dim; ++mm) {
      for (std::int64_t g = 0; g < groups; ++g) {
        const std::uint64_t wbits = wrows[static_cast<std::size_t>(mm * groups + g)];
        const std::int32_t* row = lut.entries.data() + wbits * lut.cols;
        for (std::int64_t nn = 0; nn < n_dim; ++nn) {
          acc[static_cast<std::size_t>(mm * n_dim + nn)] +=
              row[acols[static_cast<std::size_t>(g * n_dim + nn)]];
        }
      }
    }
    if (strategy == Strategy::packed_dram) {
      report.dram_lut_lookups = lookups;
    } else {
      report.local_lookups = lookups;
    }
    report.passes = 1;
  } else if (strategy == Strategy::canonical_buffer) {
    const std::uint64_t resident = sizes.canonical_bytes + sizes.reordering_bytes;
    if (resident > buffer_lut_budget(dev)) {
      throw CapacityError("buffer LUT budget", resident, buffer_lut_budget(dev));
    }
    std::optional<CanonicalLut> local_canon;
    std::optional<ReorderingLut> local_reorder;
    if (!prebuilt || !prebuilt->canonical || !prebuilt->reordering) {
      local_canon = build_canonical_lut(weight_table, act_table, p, b_o);
      local_reorder = build_reordering_lut(b_w, p);
    }
    const CanonicalLut& canon = local_canon ? *local_canon : *prebuilt->canonical;
    const ReorderingLut& reorder = local_reorder ? *local_reorder : *prebuilt->reordering;
    check_prebuilt(canon.p, canon.b_o, canon.layout, LutLayout::row_major);
    check_prebuilt(reorder.p, b_o, reorder.layout, LutLayout::row_major);
    std::optional<ActivationPlan> local_plan;
    const ActivationPlan& plan = resolve_plan(local_plan);
    const auto wrows = pack_weight_groups(w, p, groups);
    for (std::int64_t mm = 0; mm < m_dim; ++mm) {
      for (std::int64_t g = 0; g < groups; ++g) {
        const std::uint64_t wbits = wrows[static_cast<std::size_t>(mm * groups + g)];
        const std::uint64_t* rrow = reorder.entries.data() + wbits * reorder.cols;
        const std::int64_t base = g * plan.cols;
        for (std::int64_t nn = 0; nn < n_dim; ++nn) {
          const std::uint64_t canon_row =
              rrow[plan.perm_ranks[static_cast<std::size_t>(base + nn)]];
          acc[static_cast<std::size_t>(mm * n_dim + nn)] += canon.entries
              [canon_row * canon.cols + plan.multiset_ranks[static_cast<std::size_t>(base + nn)]];
        }
      }
    }
    report.local_lookups = lookups;
    report.passes = 1;
  } else {  // slice_stream
    if (k < 1) {
      throw_error(errc::invalid_argument, "slice streaming needs k >= 1");
    }
    const std::uint64_t resident = sizes.canonical_bytes + sizes.reordering_bytes;
    if (resident > bank_lut_budget(dev)) {
      throw CapacityError("bank LUT budget", resident, bank_lut_budget(dev));
    }
    const std::uint64_t slice_rows = std::uint64_t{1} << (b_w * p);
    const std::uint64_t slice_bytes =
        static_cast<std::uint64_t>(k) * slice_rows *
        static_cast<std::uint64_t>(b_o + reordering_entry_width(b_w, p));
    if (slice_bytes > buffer_lut_budget(dev)) {
      throw CapacityError("buffer LUT budget (k slices)", slice_bytes, buffer_lut_budget(dev));
    }

    std::optional<CanonicalLut> local_canon;
    std::optional<ReorderingLut> local_reorder;
    if (!prebuilt || !prebuilt->canonical || !prebuilt->reordering) {
      local_canon = build_canonical_lut(weight_table, act_table, p, b_o);
      local_reorder = build_reordering_lut(b_w, p);
      // Column-major storage makes each streamed slice one contiguous copy.
      local_canon->set_layout(LutLayout::column_major);
      local_reorder->set_layout(LutLayout::column_major);
    }
    const CanonicalLut& canon = local_canon ? *local_canon : *prebuilt->canonical;
    const ReorderingLut& reorder = local_reorder ? *local_reorder : *prebuilt->reordering;
    check_prebuilt(canon.p, canon.b_o, canon.layout, LutLayout::column_major);
    check_prebuilt(reorder.p, b_o, reorder.layout, LutLayout::column_major);
    std::optional<ActivationPlan> local_plan;
    const ActivationPlan& plan = resolve_plan(local_plan);
    const auto wrows = pack_weight_groups(w, p, groups);

    const std::int64_t total_vectors = groups * n_dim;
    // Each resident slice is one contiguous LUT column; lookups in a pass go
    // through these views only. The streamed volume is accounted, not
    // replayed byte-for-byte on the host.
    std::vector<std::span<const std::int32_t>> canon_slices(static_cast<std::size_t>(k));
    std::vector<std::span<const std::uint64_t>> reorder_slices(static_cast<std::size_t>(k));
    std::vector<std::int64_t> slice_g(static_cast<std::size_t>(k));
    std::vector<std::int64_t> slice_n(static_cast<std::size_t>(k));

    // Input-stationary over activation vectors: hold k slices in the buffer
    // and sweep all M weight rows across them before advancing.
    for (std::int64_t start = 0; start < total_vectors; start += k) {
      const std::int64_t in_pass = std::min<std::int64_t>(k, total_vectors - start);
      for (std::int64_t s = 0; s < in_pass; ++s) {
        const std::int64_t t = start + s;
        const std::int64_t nn = t / groups;
        const std::int64_t g = t % groups;
        slice_g[static_cast<std::size_t>(s)] = g;
        slice_n[static_cast<std::size_t>(s)] = nn;
        canon_slices[static_cast<std::size_t>(s)] = canon.column(plan.multiset_rank_at(g, nn));
        reorder_slices[static_cast<std::size_t>(s)] = reorder.column(plan.perm_rank_at(g, nn));
        report.dram_entry_loads += slice_rows;
      }
      for (std::int64_t mm = 0; mm < m_dim; ++mm) {
        for (std::int64_t s = 0; s < in_pass; ++s) {
          const std::int64_t g = slice_g[static_cast<std::size_t>(s)];
          const std::int64_t nn = slice_n[static_cast<std::size_t>(s)];
          const std::uint64_t wbits = wrows[static_cast<std::size_t>(mm * groups + g)];
          const std::uint64_t canon_row = reorder_slices[static_cast<std::size_t>(s)][wbits];
          acc[static_cast<std::size_t>(mm * n_dim + nn)] +=
              canon_slices[static_cast<std::size_t>(s)][canon_row];
        }
      }
      report.passes += 1;
    }
    report.local_lookups = lookups;
  }

  result.output = finalize(m_dim, n_dim, acc);
  report.modeled_time_s = modeled_time(report, dev);
  return result;
}

}  // namespace lutpack
