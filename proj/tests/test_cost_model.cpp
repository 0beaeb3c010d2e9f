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

#include <cmath>
#include <limits>
#include <random>

#include "lutpack/cost_model.hpp"
#include "lutpack/engine.hpp"

using namespace lutpack;

namespace {

const LatencyConstants kDefaults{};

/// Streaming time written out the long way, in long double, as a second route.
long double slice_time_alt(int p, long double m, long double k, long double n, int b_w,
                           const LatencyConstants& c) {
  const long double groups = std::ceil(k / p);
  return std::exp2l(static_cast<long double>(b_w) * p) * groups * n * c.l_d_seconds +
         m * groups * n * c.l_local_seconds;
}

}  // namespace

TEST_CASE("streaming time evaluates the two-term model") {
  SUBCASE("smallest instance") {
    const double t = predict_slice_time(1, 1, 1, 1, 1, kDefaults);
    CHECK(t == doctest::Approx(2 * kDefaults.l_d_seconds + kDefaults.l_local_seconds));
  }
  SUBCASE("W4A4 (3072, 768, 768) prefers p=3") {
    const double t2 = predict_slice_time(2, 3072, 768, 768, 4, kDefaults);
    const double t3 = predict_slice_time(3, 3072, 768, 768, 4, kDefaults);
    const double t4 = predict_slice_time(4, 3072, 768, 768, 4, kDefaults);
    CHECK(t3 < t2);
    CHECK(t3 < t4);
  }
  SUBCASE("doubling M doubles only the lookup term") {
    const int p = 3;
    const double stream_term = predict_slice_time(p, 0, 768, 32, 2, kDefaults);
    const double t1 = predict_slice_time(p, 100, 768, 32, 2, kDefaults);
    const double t2 = predict_slice_time(p, 200, 768, 32, 2, kDefaults);
    CHECK(t2 - stream_term == doctest::Approx(2.0 * (t1 - stream_term)).epsilon(1e-12));
  }
  SUBCASE("matches an independent long-double evaluation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const int p = 1 + static_cast<int>(rng() % 8);
      const int b_w = 1 + static_cast<int>(rng() % 4);
      const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 4096);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 4096);
      const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 512);
      const double ours = predict_slice_time(p, m, k, n, b_w, kDefaults);
      const long double alt = slice_time_alt(p, m, k, n, b_w, kDefaults);
      REQUIRE(std::abs(static_cast<long double>(ours) - alt) <= 1e-12L * alt);
    }
  }
}

TEST_CASE("buffer-resident time") {
  CHECK(predict_local_time(1, 1, 1, 1, kDefaults) ==
        doctest::Approx(kDefaults.l_local_seconds));
  SUBCASE("halving p_local doubles the time for divisible K") {
    const double t4 = predict_local_time(4, 64, 64, 8, kDefaults);
    const double t2 = predict_local_time(2, 64, 64, 8, kDefaults);
    CHECK(t2 == doctest::Approx(2.0 * t4).epsilon(1e-12));
  }
  SUBCASE("spreadsheet-style value for W2A2 at M=3072") {
    // 3072 * (768/4) * 768 * l_local, evaluated independently.
    const long double expect = 3072.0L * 192.0L * 768.0L * 3.27e-8L;
    CHECK(predict_local_time(4, 3072, 768, 768, kDefaults) ==
          doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));
  }
}

TEST_CASE("packing-degree selection minimizes the per-lookup objective") {
  SUBCASE("W4 at M=3072 picks 3") {
    CHECK(select_p_star(3072, 4, 3, kDefaults) == 3);
    CHECK(select_p_star(3072, 4, 5, kDefaults) == 3);
  }
  SUBCASE("W4 at M=768 still picks 3 from the bare objective") {
    CHECK(select_p_star(768, 4, 3, kDefaults) == 3);
  }
  SUBCASE("huge M with slow LUT growth saturates at p_dram") {
    CHECK(select_p_star(std::int64_t{1} << 40, 1, 8, kDefaults) == 8);
  }
  SUBCASE("ties break toward the smaller p") {
    // With M = 0 and b_w = 1 the objective is 2^p/p * L_D, equal at p=1,2.
    CHECK(select_p_star(0, 1, 4, kDefaults) == 1);
  }
  SUBCASE("agrees with the argmin over full streaming times") {
    // K divisible by every candidate p so the ceil plays no role.
    const std::int64_t k = 840, n = 16;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 120; ++trial) {
      const int b_w = std::vector<int>{1, 2, 4}[rng() % 3];
      const int p_dram = 1 + static_cast<int>(rng() % 8);
      const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 8192);
      int best_p = 1;
      double best = std::numeric_limits<double>::infinity();
      for (int p = 1; p <= p_dram; ++p) {
        const double t = predict_slice_time(p, m, k, n, b_w, kDefaults);
        if (t < best) {
          best = t;
          best_p = p;
        }
      }
      REQUIRE(select_p_star(m, b_w, p_dram, kDefaults) == best_p);
    }
  }
  SUBCASE("monotone in M and in b_w") {
    for (int b_w : {1, 2, 4}) {
      int prev = 1;
      for (std::int64_t m = 64; m <= 16384; m *= 2) {
        const int p = select_p_star(m, b_w, 8, kDefaults);
        REQUIRE(p >= prev);  // non-decreasing in M
        prev = p;
      }
    }
    for (std::int64_t m = 64; m <= 16384; m *= 2) {
      int prev = 9;
      for (int b_w : {1, 2, 4}) {
        const int p = select_p_star(m, b_w, 8, kDefaults);
        REQUIRE(p <= prev);  // non-increasing in b_w
        prev = p;
      }
    }
  }
}

TEST_CASE("placement decision implements the break-even inequality") {
  SUBCASE("degenerate: p* == p_local always stays in the buffer") {
    const PlacementDecision d = placement_decision(1 << 20, 4, 3, 3, kDefaults);
    CHECK(d.strategy == Strategy::canonical_buffer);
    CHECK(std::isinf(d.threshold_m));
  }
  SUBCASE("worked threshold for b_w=4, p*=3, p_local=2") {
    const PlacementDecision d = placement_decision(128, 4, 3, 2, kDefaults);
    CHECK(d.threshold_m == doctest::Approx(340.7).epsilon(0.5 / 340.7));
    CHECK(d.strategy == Strategy::canonical_buffer);  // 128 < threshold
    CHECK(placement_decision(768, 4, 3, 2, kDefaults).strategy == Strategy::slice_stream);
  }
  SUBCASE("threshold grows with L_D") {
    double prev = 0.0;
    for (double scale : {1.0, 2.0, 4.0, 8.0}) {
      LatencyConstants c = kDefaults;
      c.l_d_seconds *= scale;
      const double t = placement_decision(1, 2, 4, 2, c).threshold_m;
      REQUIRE(t > prev);
      prev = t;
    }
  }
  SUBCASE("threshold grows with b_w * p_star and with p_local/(p*-p_local)") {
    CHECK(placement_decision(1, 2, 4, 2, kDefaults).threshold_m <
          placement_decision(1, 4, 4, 2, kDefaults).threshold_m);
    CHECK(placement_decision(1, 2, 4, 1, kDefaults).threshold_m <
          placement_decision(1, 2, 4, 3, kDefaults).threshold_m);
  }
}

TEST_CASE("planner capacity inputs reproduce the device feasibility figures") {
  const DeviceConfig dev;  // 64 MiB bank, 64 KiB buffer, half budgets
  SUBCASE("W1A3 canonicalized fits p=8 in the bank") {
    const Plan plan = make_plan(512, 512, 512, 1, 3, 2, dev);
    CHECK(plan.p_dram == 8);
    REQUIRE(plan.p_local.has_value());
    CHECK(*plan.p_local == 4);
  }
  SUBCASE("packed capacity drops to 6 and 3") {
    CHECK(max_feasible_p(bank_lut_budget(dev), 1, 3, 2, false, false) == 6);
    CHECK(max_feasible_p(buffer_lut_budget(dev), 1, 3, 2, false, false) == 3);
  }
  SUBCASE("zero-ish buffer is infeasible for buffer strategies") {
    DeviceConfig tiny = dev;
    tiny.buffer_bytes = 1;
    CHECK_THROWS_AS(make_plan(512, 512, 512, 1, 3, 2, tiny), Error);
    try {
      make_plan(512, 512, 512, 1, 3, 2, tiny);
    } catch (const Error& e) {
      CHECK(e.code() == errc::infeasible_p);
    }
  }
  SUBCASE("nothing fits the bank either") {
    DeviceConfig tiny = dev;
    tiny.bank_bytes = 8;
    tiny.buffer_bytes = 8;
    try {
      make_plan(16, 16, 16, 1, 3, 2, tiny);
      FAIL("expected InfeasibleP");
    } catch (const Error& e) {
      CHECK(e.code() == errc::infeasible_p);
    }
  }
}

TEST_CASE("plans stay consistent with execution") {
  const DeviceConfig dev;
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const int b_w = std::vector<int>{1, 2, 4}[rng() % 3];
    const int b_a = 1 + static_cast<int>(rng() % 4);
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 64);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 16);
    const Plan plan = make_plan(m, 0, n, b_w, b_a, 2, dev);

    // K divisible by the planned p: counters reproduce the model exactly.
    const std::int64_t k = plan.chosen_p * (1 + static_cast<std::int64_t>(rng() % 12));
    const Plan full = make_plan(m, k, n, b_w, b_a, 2, dev);
    REQUIRE(full.chosen_p == plan.chosen_p);

    const CodeMatrix w = random_code_matrix(m, k, b_w, rng);
    const CodeMatrix a = random_code_matrix(k, n, b_a, rng);
    const CodeTable wt = identity_table(b_w);
    const CodeTable at = identity_table(b_a);
    const ExecResult r = execute(w, a, wt, at, dev,
                                 ExecParams{full.strategy, full.chosen_p, 1, 2});
    REQUIRE(std::abs(r.report.modeled_time_s - full.predicted_time_s) <=
            1e-12 * full.predicted_time_s);

    // The per-p table is the streaming model at every p.
    for (const PlanEntry& row : full.per_p) {
      const long double alt = slice_time_alt(row.p, m, k, n, b_w, dev.latency);
      REQUIRE(std::abs(static_cast<long double>(row.slice_time_s) - alt) <= 1e-12L * alt);
    }
    if (full.p_local) {
      REQUIRE(*full.p_local <= full.p_dram);
    }
    REQUIRE(full.p_star <= full.p_dram);
  }
}
