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

#include "lutpack/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <zlib.h>

namespace lutpack {

ojson device_to_json(const DeviceConfig& dev) {
  ojson j;
  j["bank_bytes"] = dev.bank_bytes;
  j["buffer_bytes"] = dev.buffer_bytes;
  j["lut_budget_fraction"] = dev.lut_budget_fraction;
  j["num_banks"] = dev.num_banks;
  j["latency"] = {{"l_d_seconds", dev.latency.l_d_seconds},
                  {"l_local_seconds", dev.latency.l_local_seconds}};
  j["dram_lookup_seconds"] = dev.dram_lookup_seconds;
  j["mac_seconds"] = dev.mac_seconds;
  j["packed_buffer_lookup_fraction"] = dev.packed_buffer_lookup_fraction;
  return j;
}

DeviceConfig device_from_json(const ojson& j) {
  DeviceConfig dev;
  try {
    if (j.contains("bank_bytes")) dev.bank_bytes = j["bank_bytes"].get<std::uint64_t>();
    if (j.contains("buffer_bytes")) dev.buffer_bytes = j["buffer_bytes"].get<std::uint64_t>();
    if (j.contains("lut_budget_fraction")) {
      dev.lut_budget_fraction = j["lut_budget_fraction"].get<double>();
    }
    if (j.contains("num_banks")) dev.num_banks = j["num_banks"].get<int>();
    if (j.contains("latency")) {
      const auto& lat = j["latency"];
      if (lat.contains("l_d_seconds")) dev.latency.l_d_seconds = lat["l_d_seconds"].get<double>();
      if (lat.contains("l_local_seconds")) {
        dev.latency.l_local_seconds = lat["l_local_seconds"].get<double>();
      }
    }
    // The two derived defaults follow an overridden l_local unless pinned.
    dev.dram_lookup_seconds = j.contains("dram_lookup_seconds")
                                  ? j["dram_lookup_seconds"].get<double>()
                                  : 10.0 * dev.latency.l_local_seconds;
    dev.mac_seconds = j.contains("mac_seconds") ? j["mac_seconds"].get<double>()
                                                : dev.latency.l_local_seconds / 3.0;
    if (j.contains("packed_buffer_lookup_fraction")) {
      dev.packed_buffer_lookup_fraction = j["packed_buffer_lookup_fraction"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw_error(errc::io_error, std::string("malformed device config: ") + e.what());
  }
  validate_device(dev);
  return dev;
}

DeviceConfig load_device_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(errc::io_error, "cannot open device config " + path.string());
  }
  ojson j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_error(errc::io_error, "malformed device config " + path.string() + ": " + e.what());
  }
  return device_from_json(j);
}

ojson to_json(const ExecReport& report) {
  ojson j;
  j["strategy"] = std::string(strategy_name(report.strategy));
  j["p"] = report.p;
  j["k"] = report.k;
  j["dram_entry_loads"] = report.dram_entry_loads;
  j["local_lookups"] = report.local_lookups;
  j["mac_ops"] = report.mac_ops;
  j["dram_lut_lookups"] = report.dram_lut_lookups;
  j["passes"] = report.passes;
  j["modeled_time_s"] = report.modeled_time_s;
  return j;
}

ojson to_json(const Plan& plan) {
  ojson j;
  j["strategy"] = std::string(strategy_name(plan.strategy));
  j["p_star"] = plan.p_star;
  if (plan.p_local) {
    j["p_local"] = *plan.p_local;
  } else {
    j["p_local"] = nullptr;
  }
  j["p_dram"] = plan.p_dram;
  j["chosen_p"] = plan.chosen_p;
  j["predicted_time_s"] = plan.predicted_time_s;
  if (std::isinf(plan.decision_threshold_m)) {
    j["decision_threshold_m"] = "inf";
  } else {
    j["decision_threshold_m"] = plan.decision_threshold_m;
  }
  ojson rows = ojson::array();
  for (const PlanEntry& entry : plan.per_p) {
    rows.push_back({{"p", entry.p}, {"slice_time_s", entry.slice_time_s}});
  }
  j["per_p"] = rows;
  return j;
}

ojson to_json(const SizeReport& report) {
  ojson j;
  j["b_w"] = report.b_w;
  j["b_a"] = report.b_a;
  j["p"] = report.p;
  j["b_o"] = report.b_o;
  j["reordering_entry_bytes"] = report.reordering_entry_bytes;
  j["canonical_cols"] = report.canonical_cols;
  j["packed_bytes"] = report.packed_bytes;
  j["canonical_bytes"] = report.canonical_bytes;
  j["reordering_bytes"] = report.reordering_bytes;
  j["column_reduction"] = report.column_reduction;
  j["total_reduction"] = report.total_reduction;
  return j;
}

ojson to_json(const SimReport& report, const TilingPlan& plan, bool include_per_bank) {
  ojson j;
  j["bank_grid"] = {plan.banks_m, plan.banks_n};
  j["banks_used"] = plan.tiles.size();
  j["wall_time_s"] = report.wall_time_s;
  j["aggregate"] = to_json(report.aggregate);
  j["utilization"] = {{"bank_lut", report.utilization.bank_lut},
                      {"bank_data", report.utilization.bank_data},
                      {"buffer_lut", report.utilization.buffer_lut},
                      {"buffer_data", report.utilization.buffer_data}};
  if (include_per_bank) {
    ojson banks = ojson::array();
    for (std::size_t i = 0; i < report.per_bank.size(); ++i) {
      ojson b = to_json(report.per_bank[i]);
      b["bank_id"] = plan.tiles[i].bank_id;
      b["rows"] = {plan.tiles[i].row_begin, plan.tiles[i].row_end};
      b["cols"] = {plan.tiles[i].col_begin, plan.tiles[i].col_end};
      banks.push_back(std::move(b));
    }
    j["per_bank"] = std::move(banks);
  }
  return j;
}

std::uint32_t output_crc32(const Int32Matrix& m) {
  std::vector<std::uint8_t> bytes(m.data.size() * 4);
  std::size_t o = 0;
  for (std::int32_t v : m.data) {
    const std::uint32_t raw = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) bytes[o++] = static_cast<std::uint8_t>(raw >> (8 * b));
  }
  return static_cast<std::uint32_t>(
      ::crc32(0, bytes.empty() ? Z_NULL : bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace lutpack
