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

#include "lutpack/pim_sim.hpp"

#include <algorithm>
#include <string>

#include "lutpack/detail/parallel.hpp"

namespace lutpack {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::uint64_t bits_to_bytes(std::int64_t elements, int bits) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(elements) * static_cast<unsigned>(bits) + 7) / 8);
}

CodeMatrix slice_rows_of(const CodeMatrix& m, std::int64_t begin, std::int64_t end) {
  CodeMatrix out;
  out.rows = end - begin;
  out.cols = m.cols;
  out.bitwidth = m.bitwidth;
  out.data.assign(m.data.begin() + begin * m.cols, m.data.begin() + end * m.cols);
  return out;
}

CodeMatrix slice_cols_of(const CodeMatrix& m, std::int64_t begin, std::int64_t end) {
  CodeMatrix out;
  out.rows = m.rows;
  out.cols = end - begin;
  out.bitwidth = m.bitwidth;
  out.data.resize(static_cast<std::size_t>(out.rows * out.cols));
  for (std::int64_t r = 0; r < m.rows; ++r) {
    std::copy(m.data.begin() + r * m.cols + begin, m.data.begin() + r * m.cols + end,
              out.data.begin() + r * out.cols);
  }
  return out;
}

}  // namespace

ResidencyBytes tile_residency(std::int64_t tile_m, std::int64_t k, std::int64_t tile_n, int b_w,
                              int b_a, const ExecParams& params) {
  ResidencyBytes r;
  const int p = std::max(1, params.p);
  const SizeReport sizes = (params.strategy == Strategy::naive_mac)
                               ? SizeReport{}
                               : compute_sizes(b_w, b_a, p, params.b_o);

  switch (params.strategy) {
    case Strategy::packed_dram:
      r.bank_lut = sizes.packed_bytes;
      break;
    case Strategy::packed_buffer:
      r.buffer_lut = sizes.packed_bytes;
      break;
    case Strategy::canonical_buffer:
      r.buffer_lut = sizes.canonical_bytes + sizes.reordering_bytes;
      break;
    case Strategy::slice_stream:
      r.bank_lut = sizes.canonical_bytes + sizes.reordering_bytes;
      r.buffer_lut = static_cast<std::uint64_t>(params.k) *
                     (std::uint64_t{1} << (b_w * p)) *
                     static_cast<std::uint64_t>(params.b_o + reordering_entry_width(b_w, p));
      break;
    case Strategy::naive_mac:
    case Strategy::auto_select:
      break;
  }

  // Bank data: the weight and activation tiles plus the int32 output tile.
  r.bank_data = bits_to_bytes(tile_m * k, b_w) + bits_to_bytes(k * tile_n, b_a) +
                static_cast<std::uint64_t>(tile_m * tile_n) * 4;
  // Buffer working set: one output column being accumulated, the current
  // window of k packed activation vectors with their permutation ranks, and
  // one packed weight vector.
  r.buffer_data = static_cast<std::uint64_t>(tile_m) * 4 +
                  static_cast<std::uint64_t>(params.k) *
                      (bits_to_bytes(p, b_a) + 8) +
                  bits_to_bytes(p, b_w);
  return r;
}

TilingPlan plan_tiling(std::int64_t m, std::int64_t k, std::int64_t n, int b_w, int b_a,
                       const ExecParams& params, const DeviceConfig& dev,
                       const TilingOptions& opts) {
  validate_device(dev);
  if (params.strategy == Strategy::auto_select) {
    throw_error(errc::invalid_argument,
                "resolve auto_select through make_plan before tiling");
  }
  if (m < 0 || k < 0 || n < 0) {
    throw_error(errc::invalid_argument, "matrix dimensions must be non-negative");
  }

  TilingPlan plan;
  plan.m = m;
  plan.k = k;
  plan.n = n;
  plan.params = params;

  if (m == 0 || n == 0 || k == 0) {
    plan.tiles.push_back(BankTile{0, 0, m, 0, n});
    return plan;
  }

  if (opts.min_rows_per_bank < 1) {
    throw_error(errc::invalid_argument, "min_rows_per_bank must be >= 1");
  }
  const std::int64_t m_groups = ceil_div(m, opts.min_rows_per_bank);
  plan.banks_m = static_cast<int>(std::min<std::int64_t>(dev.num_banks, m_groups));
  const std::int64_t spare = dev.num_banks / plan.banks_m;
  plan.banks_n = opts.split_n ? static_cast<int>(std::min<std::int64_t>(spare, n)) : 1;

  // Balanced split: tile sizes differ by at most one, no empty tiles.
  const auto ranges = [](std::int64_t extent, int parts) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const std::int64_t base = extent / parts;
    const std::int64_t remainder = extent % parts;
    std::int64_t begin = 0;
    for (int i = 0; i < parts; ++i) {
      const std::int64_t len = base + (i < remainder ? 1 : 0);
      out.emplace_back(begin, begin + len);
      begin += len;
    }
    return out;
  };
  const auto row_ranges = ranges(m, plan.banks_m);
  const auto col_ranges = ranges(n, plan.banks_n);

  int bank_id = 0;
  std::int64_t max_tile_m = 0;
  std::int64_t max_tile_n = 0;
  for (const auto& rr : row_ranges) {
    for (const auto& cr : col_ranges) {
      if (rr.second == rr.first || cr.second == cr.first) {
        throw_error(errc::degenerate_tile, "partition produced an empty tile");
      }
      plan.tiles.push_back(BankTile{bank_id++, rr.first, rr.second, cr.first, cr.second});
      max_tile_m = std::max(max_tile_m, rr.second - rr.first);
      max_tile_n = std::max(max_tile_n, cr.second - cr.first);
    }
  }

  // Feasibility is judged on the largest tile; LUTs are replicated, so every
  // bank carries the full LUT bill.
  const ResidencyBytes worst = tile_residency(max_tile_m, k, max_tile_n, b_w, b_a, params);
  if (worst.bank_lut > bank_lut_budget(dev)) {
    throw CapacityError("bank LUT budget", worst.bank_lut, bank_lut_budget(dev));
  }
  if (worst.buffer_lut > buffer_lut_budget(dev)) {
    throw CapacityError("buffer LUT budget", worst.buffer_lut, buffer_lut_budget(dev));
  }
  if (worst.bank_data > bank_data_budget(dev)) {
    throw CapacityError("bank data budget", worst.bank_data, bank_data_budget(dev));
  }
  if (worst.buffer_data > buffer_data_budget(dev)) {
    throw CapacityError("buffer data budget", worst.buffer_data, buffer_data_budget(dev));
  }
  return plan;
}

SimResult simulate(const TilingPlan& plan, const CodeMatrix& w, const CodeMatrix& a,
                   const CodeTable& weight_table, const CodeTable& act_table,
                   const DeviceConfig& dev) {
  if (w.rows != plan.m || w.cols != plan.k || a.rows != plan.k || a.cols != plan.n) {
    throw_error(errc::dimension_mismatch, "operands do not match the tiling plan");
  }

  SimResult result;
  result.output =
      Int32Matrix{plan.m, plan.n,
                  std::vector<std::int32_t>(static_cast<std::size_t>(plan.m * plan.n), 0)};
  result.report.per_bank.resize(plan.tiles.size());

  // Host-side preprocessing happens once: the LUT image is broadcast, and the
  // activation columns are canonicalized (or packed) globally, then handed to
  // each bank as the slice covering its column range. Banks in the same
  // column group share one slice.
  PreparedLuts shared_luts;
  std::vector<ActivationPlan> range_plans;
  std::vector<std::vector<std::uint64_t>> range_packed;
  std::vector<std::pair<std::int64_t, std::int64_t>> col_ranges;
  const Strategy strategy = plan.params.strategy;
  if (plan.m > 0 && plan.n > 0 && plan.k > 0) {
    const int p = std::max(1, plan.params.p);
    shared_luts = prepare_luts(strategy, weight_table, act_table, p, plan.params.b_o);
    for (const BankTile& tile : plan.tiles) {
      const std::pair<std::int64_t, std::int64_t> range{tile.col_begin, tile.col_end};
      if (col_ranges.empty() || col_ranges.back() != range) col_ranges.push_back(range);
    }
    if (strategy == Strategy::canonical_buffer || strategy == Strategy::slice_stream) {
      const ActivationPlan global = build_activation_plan(a, p, act_table);
      for (const auto& [begin, end] : col_ranges) {
        range_plans.push_back(global.slice_cols(begin, end));
      }
    } else if (strategy == Strategy::packed_dram || strategy == Strategy::packed_buffer) {
      const auto global = pack_activation_groups(a, p, act_table);
      const std::int64_t groups = (plan.k + p - 1) / p;
      for (const auto& [begin, end] : col_ranges) {
        std::vector<std::uint64_t> part(static_cast<std::size_t>(groups * (end - begin)));
        for (std::int64_t g = 0; g < groups; ++g) {
          std::copy(global.begin() + g * plan.n + begin, global.begin() + g * plan.n + end,
                    part.begin() + g * (end - begin));
        }
        range_packed.push_back(std::move(part));
      }
    }
  }
  const auto range_index = [&](const BankTile& tile) -> std::size_t {
    for (std::size_t j = 0; j < col_ranges.size(); ++j) {
      if (col_ranges[j].first == tile.col_begin && col_ranges[j].second == tile.col_end) {
        return j;
      }
    }
    return 0;
  };

  std::vector<Int32Matrix> outputs(plan.tiles.size());
  detail::parallel_for(
      static_cast<std::int64_t>(plan.tiles.size()),
      [&](std::int64_t i) {
        const BankTile& tile = plan.tiles[static_cast<std::size_t>(i)];
        const CodeMatrix w_tile = slice_rows_of(w, tile.row_begin, tile.row_end);
        const CodeMatrix a_tile = slice_cols_of(a, tile.col_begin, tile.col_end);
        ExecShared shared;
        shared.luts = &shared_luts;
        if (!range_plans.empty()) {
          shared.act_plan = &range_plans[range_index(tile)];
        }
        if (!range_packed.empty()) {
          shared.packed_act_groups = &range_packed[range_index(tile)];
        }
        ExecResult exec =
            execute(w_tile, a_tile, weight_table, act_table, dev, plan.params, &shared);
        outputs[static_cast<std::size_t>(i)] = std::move(exec.output);
        result.report.per_bank[static_cast<std::size_t>(i)] = exec.report;
      },
      /*serial_below=*/2);

  ExecReport& total = result.report.aggregate;
  total.strategy = plan.params.strategy;
  total.p = plan.params.p;
  total.k = plan.params.k;
  if (!result.report.per_bank.empty()) {
    total.strategy = result.report.per_bank.front().strategy;
    total.p = result.report.per_bank.front().p;
    total.k = result.report.per_bank.front().k;
  }
  for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
    const BankTile& tile = plan.tiles[i];
    const Int32Matrix& out = outputs[i];
    for (std::int64_t r = 0; r < out.rows; ++r) {
      std::copy(out.data.begin() + r * out.cols, out.data.begin() + (r + 1) * out.cols,
                result.output.data.begin() + (tile.row_begin + r) * plan.n + tile.col_begin);
    }
    const ExecReport& bank = result.report.per_bank[i];
    total.dram_entry_loads += bank.dram_entry_loads;
    total.local_lookups += bank.local_lookups;
    total.mac_ops += bank.mac_ops;
    total.dram_lut_lookups += bank.dram_lut_lookups;
    total.passes += bank.passes;
    result.report.wall_time_s = std::max(result.report.wall_time_s, bank.modeled_time_s);
  }
  total.modeled_time_s = result.report.wall_time_s;

  if (plan.m > 0 && plan.n > 0 && plan.k > 0) {
    std::int64_t max_tile_m = 0;
    std::int64_t max_tile_n = 0;
    for (const BankTile& tile : plan.tiles) {
      max_tile_m = std::max(max_tile_m, tile.rows());
      max_tile_n = std::max(max_tile_n, tile.cols());
    }
    const ResidencyBytes worst =
        tile_residency(max_tile_m, plan.k, max_tile_n, w.bitwidth, a.bitwidth, plan.params);
    result.report.utilization.bank_lut =
        static_cast<double>(worst.bank_lut) / static_cast<double>(bank_lut_budget(dev));
    result.report.utilization.buffer_lut =
        static_cast<double>(worst.buffer_lut) / static_cast<double>(buffer_lut_budget(dev));
    result.report.utilization.bank_data =
        static_cast<double>(worst.bank_data) / static_cast<double>(bank_data_budget(dev));
    result.report.utilization.buffer_data =
        static_cast<double>(worst.buffer_data) / static_cast<double>(buffer_data_budget(dev));
  }
  return result;
}

}  // namespace lutpack
