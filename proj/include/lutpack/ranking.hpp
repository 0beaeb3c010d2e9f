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

#include "lutpack/errors.hpp"

namespace lutpack {

/// Exact C(n, k); throws rank_out_of_range if the result does not fit 64 bits.
std::uint64_t binomial(std::uint32_t n, std::uint32_t k);

/// n! for n <= 20 (the largest factorial representable in 64 bits).
std::uint64_t factorial(std::uint32_t n);

/// Lexicographic rank of a permutation of {0..p-1} via its Lehmer code:
/// rank = sum_i L_i * (p-1-i)! where L_i counts later elements smaller than
/// perm[i]. Identity ranks 0; the reversal ranks p!-1.
std::uint64_t perm_rank(std::span<const int> perm);
std::vector<int> perm_unrank(std::uint64_t rank, int p);

/// Number of non-decreasing p-tuples over an alphabet of the given size,
/// i.e. C(alphabet + p - 1, p).
std::uint64_t multiset_count(int p, std::uint32_t alphabet);

/// Rank of a non-decreasing tuple among all non-decreasing tuples over
/// [0, alphabet), in lexicographic order (combinatorial number system).
std::uint64_t multiset_rank(std::span<const std::uint8_t> sorted_codes, std::uint32_t alphabet);
std::vector<std::uint8_t> multiset_unrank(std::uint64_t rank, int p, std::uint32_t alphabet);

/// Stable argsort: returns perm with sorted[j] = codes[perm[j]], ties keeping
/// original order. Stability makes the permutation unique, which pins down a
/// deterministic rank for vectors with repeated codes.
std::vector<int> sort_permutation(std::span<const std::uint8_t> codes);

struct CanonVector {
  std::vector<std::uint8_t> sorted_codes;
  std::uint64_t multiset_rank = 0;
  std::uint64_t perm_rank = 0;
};

/// Stable-sorts an activation code vector and records both the multiset rank
/// of the sorted form and the rank of the sorting permutation.
CanonVector canonicalize(std::span<const std::uint8_t> codes, int bitwidth);

}  // namespace lutpack
