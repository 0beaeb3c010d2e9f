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

// Test-only oracles. Everything here is independent of the library's
// implementation paths: brute-force enumeration, direct dot products and a
// second GEMM written with a different loop order and accumulator type.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lutpack/codes.hpp"
#include "lutpack/engine.hpp"

namespace oracles {

/// All non-decreasing tuples of length p over [0, alphabet), lexicographic.
inline std::vector<std::vector<std::uint8_t>> enumerate_sorted_tuples(int p,
                                                                      std::uint32_t alphabet) {
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> tuple(static_cast<std::size_t>(p), 0);
  for (;;) {
    out.push_back(tuple);
    int i = p - 1;
    while (i >= 0 && tuple[static_cast<std::size_t>(i)] == alphabet - 1) --i;
    if (i < 0) break;
    const std::uint8_t next = static_cast<std::uint8_t>(tuple[static_cast<std::size_t>(i)] + 1);
    for (int j = i; j < p; ++j) tuple[static_cast<std::size_t>(j)] = next;
  }
  return out;
}

inline std::int64_t dot(const std::vector<std::uint8_t>& wcodes,
                        const std::vector<std::uint8_t>& acodes, const lutpack::CodeTable& wt,
                        const lutpack::CodeTable& at) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < wcodes.size(); ++i) {
    acc += static_cast<std::int64_t>(wt.values[wcodes[i]]) * at.values[acodes[i]];
  }
  return acc;
}

/// Second GEMM implementation: n-outer/k-mid/m-inner loop order, 128-bit
/// accumulation, no shared helpers with the library.
inline lutpack::Int32Matrix gemm_alt(const lutpack::CodeMatrix& w, const lutpack::CodeMatrix& a,
                                     const lutpack::CodeTable& wt, const lutpack::CodeTable& at) {
  std::vector<__int128> acc(static_cast<std::size_t>(w.rows * a.cols), 0);
  for (std::int64_t n = 0; n < a.cols; ++n) {
    for (std::int64_t k = 0; k < a.rows; ++k) {
      const __int128 av = at.values[a.at(k, n)];
      for (std::int64_t m = 0; m < w.rows; ++m) {
        acc[static_cast<std::size_t>(m * a.cols + n)] += av * wt.values[w.at(m, k)];
      }
    }
  }
  lutpack::Int32Matrix out{w.rows, a.cols,
                           std::vector<std::int32_t>(static_cast<std::size_t>(w.rows * a.cols))};
  for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = static_cast<std::int32_t>(acc[i]);
  return out;
}

inline std::vector<std::uint8_t> random_codes(int p, int bitwidth, std::mt19937_64& rng) {
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(p));
  for (auto& c : codes) {
    c = static_cast<std::uint8_t>(rng() & ((std::uint64_t{1} << bitwidth) - 1));
  }
  return codes;
}

}  // namespace oracles
