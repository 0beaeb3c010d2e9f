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

#include "lutpack/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace lutpack {

namespace {

constexpr int kMaxPermLength = 20;  // 20! is the largest factorial in 64 bits

void check_perm_length(std::size_t p) {
  if (p < 1 || p > kMaxPermLength) {
    throw_error(errc::p_too_large,
                "permutation length " + std::to_string(p) + " outside [1, 20]");
  }
}

}  // namespace

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    unsigned __int128 wide = static_cast<unsigned __int128>(result) * (n - k + i);
    wide /= i;
    if (wide > UINT64_MAX) {
      throw_error(errc::rank_out_of_range, "binomial(" + std::to_string(n) + "," +
                                               std::to_string(k) + ") exceeds 64 bits");
    }
    result = static_cast<std::uint64_t>(wide);
  }
  return result;
}

std::uint64_t factorial(std::uint32_t n) {
  if (n > kMaxPermLength) {
    throw_error(errc::rank_out_of_range, "factorial(" + std::to_string(n) + ") exceeds 64 bits");
  }
  std::uint64_t result = 1;
  for (std::uint32_t i = 2; i <= n; ++i) result *= i;
  return result;
}

std::uint64_t perm_rank(std::span<const int> perm) {
  const std::size_t p = perm.size();
  check_perm_length(p);
  std::vector<bool> seen(p, false);
  for (int v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= p || seen[static_cast<std::size_t>(v)]) {
      throw_error(errc::not_a_permutation, "input is not a bijection on {0..p-1}");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < p; ++i) {
    std::uint64_t smaller_later = 0;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (perm[j] < perm[i]) ++smaller_later;
    }
    rank += smaller_later * factorial(static_cast<std::uint32_t>(p - 1 - i));
  }
  return rank;
}

std::vector<int> perm_unrank(std::uint64_t rank, int p) {
  check_perm_length(static_cast<std::size_t>(p));
  if (rank >= factorial(static_cast<std::uint32_t>(p))) {
    throw_error(errc::rank_out_of_range,
                "rank " + std::to_string(rank) + " >= " + std::to_string(p) + "!");
  }
  std::vector<int> remaining(static_cast<std::size_t>(p));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const std::uint64_t f = factorial(static_cast<std::uint32_t>(p - 1 - i));
    const std::size_t digit = static_cast<std::size_t>(rank / f);
    rank %= f;
    perm.push_back(remaining[digit]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return perm;
}

std::uint64_t multiset_count(int p, std::uint32_t alphabet) {
  if (p < 0 || alphabet == 0) {
    throw_error(errc::invalid_argument, "multiset_count needs p >= 0 and a non-empty alphabet");
  }
  return binomial(alphabet + static_cast<std::uint32_t>(p) - 1, static_cast<std::uint32_t>(p));
}

namespace {

/// Non-decreasing tuples of the given length over values in [lo, alphabet).
std::uint64_t suffix_count(std::uint32_t lo, std::uint32_t alphabet, std::uint32_t length) {
  return binomial(alphabet - lo + length - 1, length);
}

}  // namespace

std::uint64_t multiset_rank(std::span<const std::uint8_t> sorted_codes, std::uint32_t alphabet) {
  const std::size_t p = sorted_codes.size();
  if (p < 1) {
    throw_error(errc::invalid_argument, "empty tuple");
  }
  std::uint32_t lo = 0;
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const std::uint32_t x = sorted_codes[i];
    if (x >= alphabet) {
      throw_error(errc::code_out_of_range,
                  "code " + std::to_string(x) + " >= alphabet " + std::to_string(alphabet));
    }
    if (x < lo) {
      throw_error(errc::not_sorted, "tuple is not non-decreasing");
    }
    // Count tuples matching the prefix but taking a smaller value here.
    const std::uint32_t tail = static_cast<std::uint32_t>(p - 1 - i);
    for (std::uint32_t v = lo; v < x; ++v) {
      rank += suffix_count(v, alphabet, tail);
    }
    lo = x;
  }
  return rank;
}

std::vector<std::uint8_t> multiset_unrank(std::uint64_t rank, int p, std::uint32_t alphabet) {
  if (p < 1 || alphabet == 0 || alphabet > 256) {
    throw_error(errc::invalid_argument, "multiset_unrank needs p >= 1 and alphabet in [1, 256]");
  }
  if (rank >= multiset_count(p, alphabet)) {
    throw_error(errc::rank_out_of_range, "rank " + std::to_string(rank) + " >= multiset count");
  }
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(p));
  std::uint32_t lo = 0;
  for (int i = 0; i < p; ++i) {
    const std::uint32_t tail = static_cast<std::uint32_t>(p - 1 - i);
    std::uint32_t v = lo;
    for (;; ++v) {
      const std::uint64_t cnt = suffix_count(v, alphabet, tail);
      if (rank < cnt) break;
      rank -= cnt;
    }
    codes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    lo = v;
  }
  return codes;
}

std::vector<int> sort_permutation(std::span<const std::uint8_t> codes) {
  std::vector<int> perm(codes.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return codes[a] < codes[b]; });
  return perm;
}

CanonVector canonicalize(std::span<const std::uint8_t> codes, int bitwidth) {
  if (bitwidth < 1 || bitwidth > 8) {
    throw_error(errc::invalid_argument, "bitwidth must be in [1, 8]");
  }
  check_perm_length(codes.size());
  const std::uint32_t alphabet = 1u << bitwidth;
  for (std::uint8_t c : codes) {
    if (c >= alphabet) {
      throw_error(errc::code_out_of_range, "code " + std::to_string(c) + " needs more than " +
                                               std::to_string(bitwidth) + " bits");
    }
  }
  const std::vector<int> perm = sort_permutation(codes);
  CanonVector out;
  out.sorted_codes.resize(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) {
    out.sorted_codes[j] = codes[static_cast<std::size_t>(perm[j])];
  }
  out.perm_rank = perm_rank(perm);
  out.multiset_rank = multiset_rank(out.sorted_codes, alphabet);
  return out;
}

}  // namespace lutpack
