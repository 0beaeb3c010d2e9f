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

#include "lutpack/cost_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lutpack/lut.hpp"

namespace lutpack {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_dims(std::int64_t m, std::int64_t k, std::int64_t n) {
  if (m < 0 || k < 0 || n < 0) {
    throw_error(errc::invalid_argument, "matrix dimensions must be non-negative");
  }
}

double pow2d(int exponent) { return std::ldexp(1.0, exponent); }

}  // namespace

double predict_slice_time(int p, std::int64_t m, std::int64_t k, std::int64_t n, int b_w,
                          const LatencyConstants& consts) {
  if (p < 1) {
    throw_error(errc::invalid_argument, "p must be >= 1");
  }
  check_dims(m, k, n);
  const std::int64_t groups = k == 0 ? 0 : ceil_div(k, p);
  // Counts are formed exactly as the engine forms its counters, so a
  // divisible-K execution reproduces this value bit-for-bit.
  const std::uint64_t slice_entries = std::uint64_t{1} << (static_cast<unsigned>(b_w * p) % 64);
  const std::uint64_t stream_pairs =
      (b_w * p >= 64 ? std::numeric_limits<std::uint64_t>::max()
                     : slice_entries * static_cast<std::uint64_t>(groups) *
                           static_cast<std::uint64_t>(n));
  const std::uint64_t lookups = static_cast<std::uint64_t>(m) *
                                static_cast<std::uint64_t>(groups) *
                                static_cast<std::uint64_t>(n);
  return static_cast<double>(stream_pairs) * consts.l_d_seconds +
         static_cast<double>(lookups) * consts.l_local_seconds;
}

double predict_local_time(int p_local, std::int64_t m, std::int64_t k, std::int64_t n,
                          const LatencyConstants& consts) {
  if (p_local < 1) {
    throw_error(errc::invalid_argument, "p_local must be >= 1");
  }
  check_dims(m, k, n);
  const std::int64_t groups = k == 0 ? 0 : ceil_div(k, p_local);
  const std::uint64_t lookups = static_cast<std::uint64_t>(m) *
                                static_cast<std::uint64_t>(groups) *
                                static_cast<std::uint64_t>(n);
  return static_cast<double>(lookups) * consts.l_local_seconds;
}

int select_p_star(std::int64_t m, int b_w, int p_dram, const LatencyConstants& consts) {
  if (p_dram < 1) {
    throw_error(errc::invalid_argument, "p_dram must be >= 1");
  }
  check_dims(m, 0, 0);
  int best_p = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_dram; ++p) {
    const double objective =
        (pow2d(b_w * p) * consts.l_d_seconds + static_cast<double>(m) * consts.l_local_seconds) /
        static_cast<double>(p);
    if (objective < best) {  // strict: ties keep the smaller p
      best = objective;
      best_p = p;
    }
  }
  return best_p;
}

PlacementDecision placement_decision(std::int64_t m, int b_w, int p_star, int p_local,
                                     const LatencyConstants& consts) {
  if (p_star < 1 || p_local < 1) {
    throw_error(errc::invalid_argument, "p_star and p_local must be >= 1");
  }
  if (p_star <= p_local) {
    // Streaming cannot beat a buffer-resident LUT at equal or larger p.
    return {Strategy::canonical_buffer, std::numeric_limits<double>::infinity()};
  }
  const double threshold = pow2d(b_w * p_star) *
                           (consts.l_d_seconds / consts.l_local_seconds) *
                           (static_cast<double>(p_local) / (p_star - p_local));
  return {static_cast<double>(m) < threshold ? Strategy::canonical_buffer
                                             : Strategy::slice_stream,
          threshold};
}

Plan make_plan(std::int64_t m, std::int64_t k, std::int64_t n, int b_w, int b_a, int b_o,
               const DeviceConfig& dev) {
  check_dims(m, k, n);
  validate_device(dev);

  const std::optional<int> p_dram =
      max_feasible_p(bank_lut_budget(dev), b_w, b_a, b_o, /*canonicalized=*/true,
                     /*include_reordering=*/true);
  if (!p_dram) {
    throw_error(errc::infeasible_p,
                "no packing degree fits the bank LUT budget of " +
                    std::to_string(bank_lut_budget(dev)) + " B");
  }
  const std::optional<int> p_local =
      max_feasible_p(buffer_lut_budget(dev), b_w, b_a, b_o, /*canonicalized=*/true,
                     /*include_reordering=*/true);

  Plan plan;
  plan.p_dram = *p_dram;
  plan.p_local = p_local;
  plan.p_star = select_p_star(m, b_w, *p_dram, dev.latency);
  plan.per_p.reserve(static_cast<std::size_t>(*p_dram));
  for (int p = 1; p <= *p_dram; ++p) {
    plan.per_p.push_back({p, predict_slice_time(p, m, k, n, b_w, dev.latency)});
  }

  if (p_local) {
    const PlacementDecision decision =
        placement_decision(m, b_w, plan.p_star, *p_local, dev.latency);
    plan.strategy = decision.strategy;
    plan.decision_threshold_m = decision.threshold_m;
  } else {
    // Nothing fits the buffer: streaming is the only remaining route, and it
    // still needs room for one slice there. That residency depends on k and
    // gets checked at execution; a zero-ish buffer fails there.
    plan.strategy = Strategy::slice_stream;
    plan.decision_threshold_m = 0.0;
    const std::uint64_t one_slice =
        (std::uint64_t{1} << (b_w * plan.p_star)) *
        static_cast<std::uint64_t>(b_o + reordering_entry_width(b_w, plan.p_star));
    if (one_slice > buffer_lut_budget(dev)) {
      throw_error(errc::infeasible_p,
                  "buffer LUT budget of " + std::to_string(buffer_lut_budget(dev)) +
                      " B cannot hold a single slice (" + std::to_string(one_slice) + " B)");
    }
  }

  if (plan.strategy == Strategy::canonical_buffer) {
    plan.chosen_p = *p_local;
    plan.predicted_time_s = predict_local_time(*p_local, m, k, n, dev.latency);
  } else {
    plan.chosen_p = plan.p_star;
    plan.predicted_time_s = predict_slice_time(plan.p_star, m, k, n, b_w, dev.latency);
  }
  return plan;
}

}  // namespace lutpack
