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

// lutpack CLI: build and inspect LUTs, run LUT-based GEMM on the bank-level
// simulator, dump cost-model plans, sweep benchmarks to CSV and run the
// exhaustive self-checks.
//
// Exit codes: 0 ok, 1 verification mismatch, 2 infeasible/runtime failure,
// 3 usage error.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lutpack/cost_model.hpp"
#include "lutpack/engine.hpp"
#include "lutpack/json_io.hpp"
#include "lutpack/lut.hpp"
#include "lutpack/lut_io.hpp"
#include "lutpack/pim_sim.hpp"

namespace {

using namespace lutpack;

constexpr int kExitOk = 0;
constexpr int kExitVerifyMismatch = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 3;

int exit_code_for(const Error& e) {
  return e.code() == errc::invalid_argument ? kExitUsage : kExitInfeasible;
}

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool json = false;
  bool csv = false;
  bool verify = false;
  int banks_override = 0;
};

DeviceConfig resolve_device(const GlobalOpts& g) {
  DeviceConfig dev;
  if (!g.config_path.empty()) dev = load_device_config(g.config_path);
  if (g.banks_override > 0) dev.num_banks = g.banks_override;
  validate_device(dev);
  return dev;
}

std::pair<CodeTable, CodeTable> resolve_tables(const std::string& mode, int b_w, int b_a) {
  if (mode == "identity") return {identity_table(b_w), identity_table(b_a)};
  if (mode == "symmetric") return {symmetric_signed_table(b_w), symmetric_signed_table(b_a)};
  // Anything else is a JSON file shaped like the LUT sidecar.
  std::ifstream in(mode);
  if (!in) {
    throw_error(errc::invalid_argument, "unknown table mode or unreadable file: " + mode);
  }
  ojson j;
  try {
    in >> j;
    const auto parse = [](const ojson& t) {
      std::optional<std::uint8_t> zero;
      if (t.contains("zero_code") && !t["zero_code"].is_null()) {
        zero = t["zero_code"].get<std::uint8_t>();
      }
      return make_code_table(t.at("bitwidth").get<int>(),
                             t.at("values").get<std::vector<std::int32_t>>(), zero);
    };
    CodeTable wt = parse(j.at("weight_table"));
    CodeTable at = parse(j.at("act_table"));
    if (wt.bitwidth != b_w || at.bitwidth != b_a) {
      throw_error(errc::invalid_argument, "table file bitwidths do not match --bw/--ba");
    }
    return {std::move(wt), std::move(at)};
  } catch (const nlohmann::json::exception& e) {
    throw_error(errc::invalid_argument, "malformed table file " + mode + ": " + e.what());
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// "4" -> {4}; "1,2,5" -> {1,2,5}; "1..6" -> {1,...,6}; "" -> {}.
std::vector<std::int64_t> parse_list(const std::string& text) {
  std::vector<std::int64_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const std::int64_t lo = std::stoll(item.substr(0, dots));
      const std::int64_t hi = std::stoll(item.substr(dots + 2));
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoll(item));
    }
  }
  return out;
}

struct RunConfig {
  std::int64_t m = 0, k = 0, n = 0;
  int b_w = 0, b_a = 0, b_o = 2;
  Strategy strategy = Strategy::auto_select;
  int p = 0;
  int k_slices = 1;
  std::uint64_t seed = 0;
  std::string tables = "identity";
  std::int64_t m_min = 1;
};

ojson run_config_to_json(const RunConfig& cfg, const DeviceConfig& dev) {
  ojson j;
  j["problem"] = {{"m", cfg.m}, {"k", cfg.k}, {"n", cfg.n}};
  j["bits"] = {{"b_w", cfg.b_w}, {"b_a", cfg.b_a}, {"b_o", cfg.b_o}};
  j["strategy"] = std::string(strategy_name(cfg.strategy));
  j["p"] = cfg.p;
  j["k"] = cfg.k_slices;
  j["seed"] = cfg.seed;
  j["tables"] = cfg.tables;
  j["device"] = device_to_json(dev);
  return j;
}

struct GemmOutcome {
  TilingPlan tiling;
  SimResult sim;
  std::optional<Plan> plan;
  Strategy resolved = Strategy::naive_mac;
  int resolved_p = 1;
  bool verified = false;
  bool verify_ok = true;
};

GemmOutcome run_gemm(const RunConfig& cfg, const DeviceConfig& dev, bool verify) {
  const auto [wt, at] = resolve_tables(cfg.tables, cfg.b_w, cfg.b_a);
  std::mt19937_64 rng(cfg.seed);
  const CodeMatrix w = random_code_matrix(cfg.m, cfg.k, cfg.b_w, rng);
  const CodeMatrix a = random_code_matrix(cfg.k, cfg.n, cfg.b_a, rng);

  GemmOutcome outcome;
  ExecParams params;
  params.strategy = cfg.strategy;
  params.p = cfg.p;
  params.k = cfg.k_slices;
  params.b_o = cfg.b_o;
  if (cfg.strategy == Strategy::auto_select) {
    outcome.plan = make_plan(cfg.m, cfg.k, cfg.n, cfg.b_w, cfg.b_a, cfg.b_o, dev);
    params.strategy = outcome.plan->strategy;
    params.p = outcome.plan->chosen_p;
  }
  outcome.resolved = params.strategy;
  outcome.resolved_p = params.p;

  TilingOptions tiling_opts;
  tiling_opts.min_rows_per_bank = cfg.m_min;
  outcome.tiling = plan_tiling(cfg.m, cfg.k, cfg.n, cfg.b_w, cfg.b_a, params, dev, tiling_opts);
  outcome.sim = simulate(outcome.tiling, w, a, wt, at, dev);

  if (verify) {
    outcome.verified = true;
    const Int32Matrix expected = gemm_reference(w, a, wt, at);
    outcome.verify_ok = expected.data == outcome.sim.output.data;
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// sizes

int cmd_sizes(const GlobalOpts& g, int b_w, int b_a, int b_o, int p_max) {
  std::vector<SizeReport> rows;
  for (int p = 1; p <= p_max; ++p) rows.push_back(compute_sizes(b_w, b_a, p, b_o));

  if (g.json) {
    ojson j;
    j["format_version"] = kReportFormatVersion;
    j["command"] = "sizes";
    ojson arr = ojson::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    j["rows"] = arr;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "format_version,b_w,b_a,b_o,p,reordering_entry_bytes,canonical_cols,"
               "packed_bytes,canonical_bytes,reordering_bytes,column_reduction,total_reduction\n";
  for (const auto& r : rows) {
    std::cout << kReportFormatVersion << ',' << r.b_w << ',' << r.b_a << ',' << r.b_o << ','
              << r.p << ',' << r.reordering_entry_bytes << ',' << r.canonical_cols << ','
              << r.packed_bytes << ',' << r.canonical_bytes << ',' << r.reordering_bytes << ','
              << fmt_double(r.column_reduction) << ',' << fmt_double(r.total_reduction) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// build / inspect

int cmd_build(const GlobalOpts&, const std::string& kind, int b_w, int b_a, int p, int b_o,
              const std::string& tables, const std::string& out_path,
              const std::string& inspect_path) {
  if (!inspect_path.empty()) {
    const LutFileHeader h = inspect_lut(inspect_path);
    ojson j;
    j["format_version"] = kReportFormatVersion;
    j["command"] = "inspect";
    j["path"] = inspect_path;
    j["version"] = h.version;
    j["kind"] = h.kind == LutKind::packed      ? "packed"
                : h.kind == LutKind::canonical ? "canonical"
                                               : "reordering";
    j["b_w"] = h.b_w;
    j["b_a"] = h.b_a;
    j["p"] = h.p;
    j["entry_bytes"] = h.b_o;
    j["layout"] = h.layout == LutLayout::row_major ? "row_major" : "column_major";
    j["rows"] = h.rows;
    j["cols"] = h.cols;
    j["entries_crc32"] = h.entries_crc32;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  if (out_path.empty()) {
    throw_error(errc::invalid_argument, "build needs --out (or --inspect)");
  }
  if (kind == "reordering") {
    serialize_lut(build_reordering_lut(b_w, p), out_path);
  } else {
    const auto [wt, at] = resolve_tables(tables, b_w, b_a);
    if (kind == "packed") {
      serialize_lut(build_packed_lut(wt, at, p, b_o), out_path);
    } else if (kind == "canonical") {
      serialize_lut(build_canonical_lut(wt, at, p, b_o), out_path);
    } else {
      throw_error(errc::invalid_argument, "unknown LUT kind: " + kind);
    }
  }
  const LutFileHeader h = inspect_lut(out_path);
  std::cout << "wrote " << kind << " LUT to " << out_path << " (" << h.rows << "x" << h.cols
            << " entries, " << int(h.b_o) << " B each, crc32=" << h.entries_crc32 << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gemm

int cmd_gemm(const GlobalOpts& g, const RunConfig& cfg) {
  const DeviceConfig dev = resolve_device(g);
  const GemmOutcome outcome = run_gemm(cfg, dev, g.verify);
  const std::uint32_t crc = output_crc32(outcome.sim.output);
  const bool per_bank = outcome.tiling.tiles.size() <= 32;

  if (g.json) {
    ojson j;
    j["format_version"] = kReportFormatVersion;
    j["command"] = "gemm";
    j["config"] = run_config_to_json(cfg, dev);
    if (outcome.plan) j["plan"] = to_json(*outcome.plan);
    j["resolved"] = {{"strategy", std::string(strategy_name(outcome.resolved))},
                     {"p", outcome.resolved_p}};
    j["output"] = {{"rows", outcome.sim.output.rows},
                   {"cols", outcome.sim.output.cols},
                   {"crc32", crc}};
    j["sim"] = to_json(outcome.sim.report, outcome.tiling, per_bank);
    j["verify"] = outcome.verified ? (outcome.verify_ok ? "pass" : "fail") : "skipped";
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "gemm (" << cfg.m << ", " << cfg.k << ", " << cfg.n << ") W" << cfg.b_w << "A"
              << cfg.b_a << " tables=" << cfg.tables << " seed=" << cfg.seed << "\n";
    if (outcome.plan) {
      const Plan& plan = *outcome.plan;
      std::cout << "plan: strategy=" << strategy_name(plan.strategy) << " p*=" << plan.p_star
                << " p_local=" << (plan.p_local ? std::to_string(*plan.p_local) : "-")
                << " p_dram=" << plan.p_dram
                << " threshold_M=" << fmt_double(plan.decision_threshold_m)
                << " predicted=" << fmt_double(plan.predicted_time_s) << " s\n";
    }
    std::cout << "strategy=" << strategy_name(outcome.resolved) << " p=" << outcome.resolved_p
              << " k=" << cfg.k_slices << " grid=" << outcome.tiling.banks_m << "x"
              << outcome.tiling.banks_n << "\n";
    const ExecReport& agg = outcome.sim.report.aggregate;
    std::cout << "counters: dram_entry_loads=" << agg.dram_entry_loads
              << " local_lookups=" << agg.local_lookups << " mac_ops=" << agg.mac_ops
              << " dram_lut_lookups=" << agg.dram_lut_lookups << " passes=" << agg.passes << "\n";
    std::cout << "wall_time_s=" << fmt_double(outcome.sim.report.wall_time_s) << "\n";
    std::cout << "output crc32=" << crc << "\n";
    if (outcome.verified) {
      std::cout << "verify: " << (outcome.verify_ok ? "PASS" : "FAIL") << "\n";
    }
  }
  return outcome.verified && !outcome.verify_ok ? kExitVerifyMismatch : kExitOk;
}

// ---------------------------------------------------------------------------
// plan

int cmd_plan(const GlobalOpts& g, const RunConfig& cfg) {
  const DeviceConfig dev = resolve_device(g);
  const Plan plan = make_plan(cfg.m, cfg.k, cfg.n, cfg.b_w, cfg.b_a, cfg.b_o, dev);

  if (g.json) {
    ojson j;
    j["format_version"] = kReportFormatVersion;
    j["command"] = "plan";
    j["config"] = run_config_to_json(cfg, dev);
    j["plan"] = to_json(plan);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "plan for (" << cfg.m << ", " << cfg.k << ", " << cfg.n << ") W" << cfg.b_w << "A"
            << cfg.b_a << " b_o=" << cfg.b_o << "\n";
  std::cout << "p_dram=" << plan.p_dram
            << " p_local=" << (plan.p_local ? std::to_string(*plan.p_local) : "-")
            << " p*=" << plan.p_star << "\n";
  std::cout << "decision threshold M=" << fmt_double(plan.decision_threshold_m) << " -> "
            << strategy_name(plan.strategy) << " at p=" << plan.chosen_p << "\n";
  std::cout << "predicted_time_s=" << fmt_double(plan.predicted_time_s) << "\n";
  std::cout << "p,slice_time_s\n";
  for (const PlanEntry& row : plan.per_p) {
    std::cout << row.p << ',' << fmt_double(row.slice_time_s) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const GlobalOpts& g, const std::string& ms, const std::string& ks,
              const std::string& ns, const std::string& bws, const std::string& bas,
              const std::string& bos, const std::string& ps, const std::string& kslices,
              const std::vector<std::string>& strategies, const std::string& tables,
              std::int64_t m_min, const std::string& out_path) {
  const DeviceConfig dev = resolve_device(g);
  const auto m_list = parse_list(ms);
  const auto k_list = parse_list(ks);
  const auto n_list = parse_list(ns);
  const auto bw_list = parse_list(bws);
  const auto ba_list = parse_list(bas);
  const auto bo_list = parse_list(bos);
  const auto p_list = parse_list(ps);
  const auto kslice_list = parse_list(kslices);

  std::ostringstream csv;
  csv << "format_version,m,k,n,b_w,b_a,b_o,strategy,p,k_slices,tables,seed,"
         "resolved_strategy,resolved_p,banks_m,banks_n,dram_entry_loads,local_lookups,"
         "mac_ops,dram_lut_lookups,passes,wall_time_s,output_crc32,status\n";

  for (std::int64_t m : m_list)
    for (std::int64_t k : k_list)
      for (std::int64_t n : n_list)
        for (std::int64_t bw : bw_list)
          for (std::int64_t ba : ba_list)
            for (std::int64_t bo : bo_list)
              for (const std::string& strategy_name_str : strategies)
                for (std::int64_t p : p_list)
                  for (std::int64_t ks_v : kslice_list) {
                    RunConfig cfg;
                    cfg.m = m;
                    cfg.k = k;
                    cfg.n = n;
                    cfg.b_w = static_cast<int>(bw);
                    cfg.b_a = static_cast<int>(ba);
                    cfg.b_o = static_cast<int>(bo);
                    cfg.p = static_cast<int>(p);
                    cfg.k_slices = static_cast<int>(ks_v);
                    cfg.seed = g.seed;
                    cfg.tables = tables;
                    cfg.m_min = m_min;
                    const auto strategy = strategy_from_name(strategy_name_str);
                    csv << kReportFormatVersion << ',' << m << ',' << k << ',' << n << ',' << bw
                        << ',' << ba << ',' << bo << ',' << strategy_name_str << ',' << p << ','
                        << ks_v << ',' << tables << ',' << g.seed << ',';
                    if (!strategy) {
                      csv << ",,,,,,,,,,,error:UnknownStrategy\n";
                      continue;
                    }
                    cfg.strategy = *strategy;
                    try {
                      const GemmOutcome outcome = run_gemm(cfg, dev, g.verify);
                      const ExecReport& agg = outcome.sim.report.aggregate;
                      const char* status = "ok";
                      if (outcome.verified && !outcome.verify_ok) status = "verify_mismatch";
                      csv << strategy_name(outcome.resolved) << ',' << outcome.resolved_p << ','
                          << outcome.tiling.banks_m << ',' << outcome.tiling.banks_n << ','
                          << agg.dram_entry_loads << ',' << agg.local_lookups << ','
                          << agg.mac_ops << ',' << agg.dram_lut_lookups << ',' << agg.passes
                          << ',' << fmt_double(outcome.sim.report.wall_time_s) << ','
                          << output_crc32(outcome.sim.output) << ',' << status << "\n";
                    } catch (const Error& e) {
                      csv << ",,,,,,,,,,," << "error:" << errc_name(e.code()) << "\n";
                    }
                  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
      throw_error(errc::io_error, "cannot write " + out_path);
    }
    out << csv.str();
    std::cout << "wrote sweep to " << out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

CheckResult check_pack_roundtrip(bool inject) {
  CheckResult r{"pack_roundtrip", true, ""};
  for (int b = 1; b <= 8; ++b) {
    for (int p = 1; p * b <= 16; ++p) {
      const std::uint64_t space = std::uint64_t{1} << (p * b);
      for (std::uint64_t bits = 0; bits < space; ++bits) {
        std::uint64_t probe = inject ? bits ^ 1u : bits;
        auto codes = unpack(PackedVector{p, b, bits});
        if (pack_bits(codes, b) != probe) {
          r.pass = false;
          r.detail = "bits=" + std::to_string(bits) + " p=" + std::to_string(p) +
                     " b=" + std::to_string(b);
          return r;
        }
      }
    }
  }
  return r;
}

CheckResult check_perm_rank(bool inject) {
  CheckResult r{"perm_rank", true, ""};
  for (int p = 1; p <= 6; ++p) {
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    std::uint64_t position = 0;
    do {
      const std::uint64_t expect = inject ? position + 1 : position;
      if (perm_rank(perm) != expect || perm_unrank(position, p) != perm) {
        r.pass = false;
        r.detail = "p=" + std::to_string(p) + " position=" + std::to_string(position);
        return r;
      }
      ++position;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return r;
}

CheckResult check_multiset_rank(bool inject) {
  CheckResult r{"multiset_rank", true, ""};
  for (std::uint32_t alphabet : {2u, 4u, 8u}) {
    for (int p = 1; p <= 4; ++p) {
      // Lexicographic enumeration of non-decreasing tuples.
      std::vector<std::uint8_t> tuple(p, 0);
      std::uint64_t position = 0;
      for (;;) {
        const std::uint64_t expect = inject ? position + 1 : position;
        if (multiset_rank(tuple, alphabet) != expect ||
            multiset_unrank(position, p, alphabet) != tuple) {
          r.pass = false;
          r.detail = "alphabet=" + std::to_string(alphabet) + " p=" + std::to_string(p) +
                     " position=" + std::to_string(position);
          return r;
        }
        ++position;
        int i = p - 1;
        while (i >= 0 && tuple[i] == alphabet - 1) --i;
        if (i < 0) break;
        const std::uint8_t next = static_cast<std::uint8_t>(tuple[i] + 1);
        for (int j = i; j < p; ++j) tuple[j] = next;
      }
      if (position != multiset_count(p, alphabet)) {
        r.pass = false;
        r.detail = "count mismatch at alphabet=" + std::to_string(alphabet) +
                   " p=" + std::to_string(p);
        return r;
      }
    }
  }
  return r;
}

CheckResult check_dedup(bool inject) {
  CheckResult r{"dedup", true, ""};
  const std::vector<std::pair<int, int>> grid = {{1, 7}, {2, 5}, {3, 4}};
  for (const auto& [b_a, p_max] : grid) {
    for (int p = 1; p <= p_max; ++p) {
      const CodeTable wt = identity_table(1);
      const CodeTable at = identity_table(b_a);
      const PackedLut lut = build_packed_lut(wt, at, p, 4);
      const ReorderingLut reorder = build_reordering_lut(1, p);
      std::set<std::vector<std::uint8_t>> classes;
      for (std::uint64_t c = 0; c < lut.cols; ++c) {
        std::vector<std::uint8_t> codes(static_cast<std::size_t>(p));
        unpack_bits(c, p, b_a, codes.data());
        const CanonVector canon = canonicalize(codes, b_a);
        classes.insert(canon.sorted_codes);
        const std::uint64_t rep = pack_bits(canon.sorted_codes, b_a);
        for (std::uint64_t w = 0; w < lut.rows; ++w) {
          const std::uint64_t w_reordered = reorder.entry(w, canon.perm_rank);
          if (lut.entry(w, c) != lut.entry(w_reordered, rep)) {
            r.pass = false;
            r.detail = "column content mismatch at b_a=" + std::to_string(b_a) +
                       " p=" + std::to_string(p);
            return r;
          }
        }
      }
      std::uint64_t expect = multiset_count(p, 1u << b_a);
      if (inject) ++expect;
      if (classes.size() != expect) {
        r.pass = false;
        r.detail = "b_a=" + std::to_string(b_a) + " p=" + std::to_string(p) + ": got " +
                   std::to_string(classes.size()) + " classes, want " + std::to_string(expect);
        return r;
      }
    }
  }
  return r;
}

CheckResult check_lookup_equivalence(bool inject) {
  CheckResult r{"lookup_equivalence", true, ""};
  const auto probe = [&](const CodeTable& wt, const CodeTable& at,
                         const std::vector<std::uint8_t>& wcodes,
                         const std::vector<std::uint8_t>& acodes, const PackedLut& packed,
                         const CanonicalLut& canon, const ReorderingLut& reorder) {
    const std::uint64_t wbits = pack_bits(wcodes, wt.bitwidth);
    const std::uint64_t abits = pack_bits(acodes, at.bitwidth);
    const CanonVector cv = canonicalize(acodes, at.bitwidth);
    const std::int32_t direct = packed.entry(wbits, abits);
    const std::int32_t via_canon =
        canon.entry(reorder.entry(wbits, cv.perm_rank), cv.multiset_rank);
    return inject ? direct != via_canon : direct == via_canon;
  };

  {
    const CodeTable wt = identity_table(1);
    const CodeTable at = identity_table(2);
    for (int p = 1; p <= 3; ++p) {
      const PackedLut packed = build_packed_lut(wt, at, p, 4);
      const CanonicalLut canon = build_canonical_lut(wt, at, p, 4);
      const ReorderingLut reorder = build_reordering_lut(1, p);
      std::vector<std::uint8_t> wcodes(static_cast<std::size_t>(p));
      std::vector<std::uint8_t> acodes(static_cast<std::size_t>(p));
      for (std::uint64_t wbits = 0; wbits < packed.rows; ++wbits) {
        unpack_bits(wbits, p, 1, wcodes.data());
        for (std::uint64_t abits = 0; abits < packed.cols; ++abits) {
          unpack_bits(abits, p, 2, acodes.data());
          if (!probe(wt, at, wcodes, acodes, packed, canon, reorder)) {
            r.pass = false;
            r.detail = "exhaustive case p=" + std::to_string(p);
            return r;
          }
        }
      }
    }
  }

  {
    const CodeTable wt = symmetric_signed_table(2);
    const CodeTable at = symmetric_signed_table(3);
    const int p = 3;
    const PackedLut packed = build_packed_lut(wt, at, p, 4);
    const CanonicalLut canon = build_canonical_lut(wt, at, p, 4);
    const ReorderingLut reorder = build_reordering_lut(2, p);
    std::mt19937_64 rng(7);
    std::vector<std::uint8_t> wcodes(p), acodes(p);
    for (int trial = 0; trial < 10000; ++trial) {
      for (auto& c : wcodes) c = static_cast<std::uint8_t>(rng() & 3);
      for (auto& c : acodes) c = static_cast<std::uint8_t>(rng() & 7);
      if (!probe(wt, at, wcodes, acodes, packed, canon, reorder)) {
        r.pass = false;
        r.detail = "randomized case trial=" + std::to_string(trial);
        return r;
      }
    }
  }
  return r;
}

int cmd_selftest(const std::string& inject_fault) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> results;
  results.push_back(check_pack_roundtrip(inject_fault == "pack_roundtrip"));
  results.push_back(check_perm_rank(inject_fault == "perm_rank"));
  results.push_back(check_multiset_rank(inject_fault == "multiset_rank"));
  results.push_back(check_dedup(inject_fault == "dedup"));
  results.push_back(check_lookup_equivalence(inject_fault == "lookup_equivalence"));

  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
    all_pass &= r.pass;
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  std::cout << (all_pass ? "selftest: PASS" : "selftest: FAIL") << " ("
            << fmt_double(elapsed.count()) << " s)\n";
  return all_pass ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LUT-based low-bit GEMM toolkit with a bank-level PIM simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "device config JSON path")->envname("LUTPACK_CONFIG");
  app.add_option("--seed", g.seed, "RNG seed for generated matrices");
  app.add_flag("--json", g.json, "emit JSON instead of text/CSV");
  app.add_flag("--csv", g.csv, "emit CSV (default for sizes/bench)");
  app.add_flag("--verify", g.verify, "cross-check outputs against the reference GEMM");
  app.add_option("--banks", g.banks_override, "override the device bank count");

  // sizes
  auto* sizes = app.add_subcommand("sizes", "LUT capacity table across packing degrees");
  int s_bw = 1, s_ba = 3, s_bo = 2, s_pmax = 7;
  sizes->add_option("--bw", s_bw, "weight bitwidth")->required();
  sizes->add_option("--ba", s_ba, "activation bitwidth")->required();
  sizes->add_option("--bo", s_bo, "entry width in bytes");
  sizes->add_option("--pmax", s_pmax, "largest packing degree");

  // build
  auto* build = app.add_subcommand("build", "build a LUT file or inspect an existing one");
  std::string b_kind = "canonical", b_tables = "identity", b_out, b_inspect;
  int b_bw = 1, b_ba = 3, b_p = 1, b_bo = 2;
  build->add_option("--kind", b_kind, "packed | canonical | reordering");
  build->add_option("--bw", b_bw, "weight bitwidth");
  build->add_option("--ba", b_ba, "activation bitwidth");
  build->add_option("--p", b_p, "packing degree");
  build->add_option("--bo", b_bo, "entry width in bytes");
  build->add_option("--tables", b_tables, "identity | symmetric | <file.json>");
  build->add_option("--out", b_out, "output path");
  build->add_option("--inspect", b_inspect, "print the header of an existing LUT file");

  // gemm
  auto* gemm = app.add_subcommand("gemm", "run one GEMM on the bank simulator");
  RunConfig gc;
  std::string g_strategy = "auto";
  gemm->add_option("--M", gc.m, "output rows")->required();
  gemm->add_option("--K", gc.k, "inner dimension")->required();
  gemm->add_option("--N", gc.n, "output columns")->required();
  gemm->add_option("--bw", gc.b_w, "weight bitwidth")->required();
  gemm->add_option("--ba", gc.b_a, "activation bitwidth")->required();
  gemm->add_option("--bo", gc.b_o, "LUT entry width in bytes");
  gemm->add_option("--strategy", g_strategy,
                   "naive_mac | packed_dram | packed_buffer | canonical_buffer | slice_stream | "
                   "auto");
  gemm->add_option("--p", gc.p, "packing degree (ignored by auto)");
  gemm->add_option("--k", gc.k_slices, "co-resident slices for slice streaming");
  gemm->add_option("--tables", gc.tables, "identity | symmetric | <file.json>");
  gemm->add_option("--m-min", gc.m_min, "minimum weight rows per bank tile");

  // plan
  auto* plan = app.add_subcommand("plan", "dump the cost-model plan for a problem");
  RunConfig pc;
  plan->add_option("--M", pc.m, "output rows")->required();
  plan->add_option("--K", pc.k, "inner dimension")->required();
  plan->add_option("--N", pc.n, "output columns")->required();
  plan->add_option("--bw", pc.b_w, "weight bitwidth")->required();
  plan->add_option("--ba", pc.b_a, "activation bitwidth")->required();
  plan->add_option("--bo", pc.b_o, "LUT entry width in bytes");

  // bench
  auto* bench = app.add_subcommand("bench", "cartesian sweep, one CSV row per point");
  std::string be_m = "128", be_k = "128", be_n = "16", be_bw = "1", be_ba = "3", be_bo = "2";
  std::string be_p = "1", be_ks = "1", be_tables = "identity", be_out;
  std::int64_t be_m_min = 1;
  std::vector<std::string> be_strategies = {"canonical_buffer"};
  bench->add_option("--M", be_m, "list/range, e.g. 128,256 or 64..512");
  bench->add_option("--K", be_k, "list/range");
  bench->add_option("--N", be_n, "list/range");
  bench->add_option("--bw", be_bw, "list/range");
  bench->add_option("--ba", be_ba, "list/range");
  bench->add_option("--bo", be_bo, "list/range");
  bench->add_option("--p", be_p, "list/range");
  bench->add_option("--k", be_ks, "list/range");
  bench->add_option("--strategy", be_strategies, "one or more strategies")->delimiter(',');
  bench->add_option("--tables", be_tables, "identity | symmetric | <file.json>");
  bench->add_option("--m-min", be_m_min, "minimum weight rows per bank tile");
  bench->add_option("--out", be_out, "write CSV here instead of stdout");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the exhaustive small-space oracles");
  std::string st_fault;
  selftest->add_option("--inject-fault", st_fault,
                       "perturb one check to exercise failure reporting: pack_roundtrip | "
                       "perm_rank | multiset_rank | dedup | lookup_equivalence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sizes->parsed()) return cmd_sizes(g, s_bw, s_ba, s_bo, s_pmax);
    if (build->parsed()) {
      return cmd_build(g, b_kind, b_bw, b_ba, b_p, b_bo, b_tables, b_out, b_inspect);
    }
    if (gemm->parsed()) {
      const auto strategy = strategy_from_name(g_strategy);
      if (!strategy) {
        throw_error(errc::invalid_argument, "unknown strategy: " + g_strategy);
      }
      gc.strategy = *strategy;
      if (gc.strategy != Strategy::auto_select && gc.strategy != Strategy::naive_mac &&
          gc.p == 0) {
        gc.p = 1;
      }
      gc.seed = g.seed;
      return cmd_gemm(g, gc);
    }
    if (plan->parsed()) {
      pc.seed = g.seed;
      return cmd_plan(g, pc);
    }
    if (bench->parsed()) {
      return cmd_bench(g, be_m, be_k, be_n, be_bw, be_ba, be_bo, be_p, be_ks, be_strategies,
                       be_tables, be_m_min, be_out);
    }
    if (selftest->parsed()) return cmd_selftest(st_fault);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitUsage;
}
