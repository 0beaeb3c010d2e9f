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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lutpack/lut.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(LUTPACK_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, got);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

int column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_CASE("sizes CSV re-parses to the exact computed figures") {
  const CliResult r = run_cli("sizes --bw 1 --ba 3 --bo 2 --pmax 7");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 8);  // header + 7 rows
  const auto header = split_csv(lines[0]);
  const int col_red = column_index(header, "column_reduction");
  const int tot_red = column_index(header, "total_reduction");
  const int packed_col = column_index(header, "packed_bytes");
  REQUIRE(col_red >= 0);
  REQUIRE(tot_red >= 0);
  for (int p = 1; p <= 7; ++p) {
    const auto cells = split_csv(lines[static_cast<std::size_t>(p)]);
    const lutpack::SizeReport expect = lutpack::compute_sizes(1, 3, p, 2);
    CHECK(std::stoull(cells[static_cast<std::size_t>(packed_col)]) == expect.packed_bytes);
    CHECK(std::strtod(cells[static_cast<std::size_t>(col_red)].c_str(), nullptr) ==
          expect.column_reduction);
    CHECK(std::strtod(cells[static_cast<std::size_t>(tot_red)].c_str(), nullptr) ==
          expect.total_reduction);
  }
  // The worked figures land where they should.
  const auto p7 = split_csv(lines[7]);
  CHECK(std::strtod(p7[static_cast<std::size_t>(col_red)].c_str(), nullptr) ==
        doctest::Approx(611.06).epsilon(1e-3));
}

TEST_CASE("gemm verifies the micro-instance and is byte-deterministic") {
  const std::string args =
      "--seed 7 --verify --json gemm --M 1 --K 3 --N 1 --bw 1 --ba 3 --strategy slice_stream "
      "--p 3";
  const CliResult first = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out.find("\"verify\": \"pass\"") != std::string::npos);
  CHECK(first.out.find("\"crc32\"") != std::string::npos);
  const CliResult second = run_cli(args);
  CHECK(second.out == first.out);
}

TEST_CASE("gemm JSON reports match the committed golden file") {
  // Reports are golden-file artifacts: any byte drift means the report format
  // changed and format_version must be bumped along with this file.
  const CliResult r = run_cli(
      "--seed 7 --verify --json gemm --M 6 --K 9 --N 4 --bw 1 --ba 3 --strategy slice_stream "
      "--p 3 --k 2");
  REQUIRE(r.exit_code == 0);
  std::ifstream golden(std::string(LUTPACK_GOLDEN_DIR) + "/gemm_micro_report.json");
  REQUIRE(golden.good());
  std::stringstream expected;
  expected << golden.rdbuf();
  CHECK(r.out == expected.str());
}

TEST_CASE("gemm text mode prints counters and the verify verdict") {
  const CliResult r = run_cli(
      "--seed 3 --verify gemm --M 8 --K 9 --N 4 --bw 2 --ba 2 --strategy canonical_buffer "
      "--p 3 --tables symmetric");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("verify: PASS") != std::string::npos);
  CHECK(r.out.find("local_lookups=96") != std::string::npos);  // 8 * 3 * 4
}

TEST_CASE("gemm auto prints the plan with the break-even threshold") {
  const CliResult r =
      run_cli("--seed 1 gemm --M 64 --K 24 --N 8 --bw 4 --ba 4 --strategy auto");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("plan:") != std::string::npos);
  CHECK(r.out.find("threshold_M=") != std::string::npos);
}

TEST_CASE("plan reports the capacity-derived packing degrees") {
  SUBCASE("W1A3 defaults") {
    const CliResult r = run_cli("--json plan --M 512 --K 512 --N 512 --bw 1 --ba 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"p_dram\": 8") != std::string::npos);
    CHECK(r.out.find("\"p_local\": 4") != std::string::npos);
  }
  SUBCASE("W4A4 large M picks p*=3") {
    const CliResult r = run_cli("--json plan --M 3072 --K 768 --N 768 --bw 4 --ba 4");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"p_star\": 3") != std::string::npos);
  }
  SUBCASE("zero-ish buffer fails cleanly with the infeasible exit code") {
    std::ofstream cfg("/tmp/lutpack_tiny_buffer.json");
    cfg << "{\"buffer_bytes\": 1}\n";
    cfg.close();
    const CliResult r = run_cli(
        "--config /tmp/lutpack_tiny_buffer.json plan --M 64 --K 64 --N 64 --bw 1 --ba 3");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("InfeasibleP") != std::string::npos);
  }
}

TEST_CASE("bench sweeps emit one row per point and keep failures in-band") {
  SUBCASE("buffer beats DRAM residency at every feasible p") {
    const CliResult r = run_cli(
        "--seed 5 --banks 1 bench --M 64 --K 64 --N 16 --bw 1 --ba 3 --p 1..6 "
        "--strategy packed_buffer,packed_dram");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 13);  // header + 6 p-values x 2 strategies
    const auto header = split_csv(lines[0]);
    const int c_strategy = column_index(header, "strategy");
    const int c_p = column_index(header, "p");
    const int c_time = column_index(header, "wall_time_s");
    const int c_status = column_index(header, "status");
    std::map<int, double> buffer_time, dram_time;
    int error_rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto cells = split_csv(lines[i]);
      const int p = std::stoi(cells[static_cast<std::size_t>(c_p)]);
      const std::string status = cells[static_cast<std::size_t>(c_status)];
      if (status != "ok") {
        ++error_rows;
        CHECK(status.find("error:CapacityExceeded") == 0);
        continue;
      }
      const double t = std::strtod(cells[static_cast<std::size_t>(c_time)].c_str(), nullptr);
      if (cells[static_cast<std::size_t>(c_strategy)] == "packed_buffer") {
        buffer_time[p] = t;
      } else {
        dram_time[p] = t;
      }
    }
    // packed_buffer fits p <= 3 at the 32 KiB budget; the bank fits all six.
    CHECK(error_rows == 3);
    REQUIRE(buffer_time.size() == 3);
    REQUIRE(dram_time.size() == 6);
    for (const auto& [p, t] : buffer_time) REQUIRE(t < dram_time.at(p));
  }
  SUBCASE("k sweep hits the buffer feasibility wall") {
    const CliResult r = run_cli(
        "--seed 5 bench --M 32 --K 36 --N 8 --bw 2 --ba 2 --p 6 --k 1,2,4,64,512 "
        "--strategy slice_stream");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 6);
    const auto header = split_csv(lines[0]);
    const int c_status = column_index(header, "status");
    int ok = 0, capacity = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::string status = split_csv(lines[i])[static_cast<std::size_t>(c_status)];
      if (status == "ok") {
        ++ok;
      } else if (status.find("error:CapacityExceeded") == 0) {
        ++capacity;
      }
    }
    CHECK(ok >= 1);        // small k fits
    CHECK(capacity >= 1);  // large k does not
  }
  SUBCASE("empty sweep emits only the header") {
    const CliResult r = run_cli("bench --M \"\" --strategy canonical_buffer");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] ==
          "format_version,m,k,n,b_w,b_a,b_o,strategy,p,k_slices,tables,seed,"
          "resolved_strategy,resolved_p,banks_m,banks_n,dram_entry_loads,local_lookups,"
          "mac_ops,dram_lut_lookups,passes,wall_time_s,output_crc32,status");
  }
}

TEST_CASE("custom code tables load from a JSON file") {
  const std::string path = "/tmp/lutpack_cli_tables.json";
  std::ofstream f(path);
  f << R"({
    "weight_table": {"bitwidth": 1, "values": [0, 3], "zero_code": 0},
    "act_table": {"bitwidth": 2, "values": [-2, 0, 1, 5], "zero_code": 1}
  })";
  f.close();
  const CliResult r = run_cli(
      "--seed 2 --verify gemm --M 9 --K 7 --N 5 --bw 1 --ba 2 --strategy slice_stream --p 3 "
      "--k 2 --tables " +
      path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("verify: PASS") != std::string::npos);

  SUBCASE("bitwidth mismatch against --bw/--ba is a usage error") {
    const CliResult bad =
        run_cli("gemm --M 4 --K 4 --N 4 --bw 2 --ba 2 --strategy naive_mac --tables " + path);
    CHECK(bad.exit_code == 3);
  }
}

TEST_CASE("build writes a LUT file that inspect reads back") {
  const std::string path = "/tmp/lutpack_cli_build.lut";
  const CliResult w = run_cli("build --kind canonical --bw 1 --ba 3 --p 3 --bo 2 --out " + path);
  REQUIRE(w.exit_code == 0);
  const CliResult i = run_cli("build --inspect " + path);
  REQUIRE(i.exit_code == 0);
  CHECK(i.out.find("\"kind\": \"canonical\"") != std::string::npos);
  CHECK(i.out.find("\"rows\": 8") != std::string::npos);
  CHECK(i.out.find("\"cols\": 120") != std::string::npos);
}

TEST_CASE("selftest passes clean and fails loudly under an injected fault") {
  const CliResult ok = run_cli("selftest");
  REQUIRE(ok.exit_code == 0);
  CHECK(ok.out.find("selftest: PASS") != std::string::npos);

  const CliResult bad = run_cli("selftest --inject-fault dedup");
  CHECK(bad.exit_code != 0);
  CHECK(bad.out.find("[FAIL] dedup") != std::string::npos);
}

TEST_CASE("usage errors exit with code 3") {
  CHECK(run_cli("gemm --M 4").exit_code == 3);               // missing required options
  CHECK(run_cli("frobnicate").exit_code == 3);               // unknown subcommand
  const CliResult r = run_cli("--seed 1 gemm --M 4 --K 4 --N 4 --bw 1 --ba 1 --strategy bogus");
  CHECK(r.exit_code == 3);
}

TEST_CASE("verification mismatch is impossible on honest runs") {
  // All strategies are bit-exact, so --verify must return 0 across a spread
  // of shapes and tables.
  for (const char* shape : {"--M 17 --K 13 --N 5 --bw 2 --ba 3",
                            "--M 3 --K 31 --N 9 --bw 1 --ba 4"}) {
    for (const char* strategy : {"naive_mac", "packed_dram", "canonical_buffer", "auto"}) {
      const CliResult r = run_cli(std::string("--seed 11 --verify gemm ") + shape +
                                  " --strategy " + strategy + " --p 2 --tables symmetric");
      REQUIRE(r.exit_code == 0);
    }
  }
}
