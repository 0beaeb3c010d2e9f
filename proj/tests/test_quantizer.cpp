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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lutpack/codes.hpp"
#include "lutpack/ranking.hpp"
#include "oracles.hpp"

using namespace lutpack;

namespace {

std::vector<std::uint8_t> u8(std::initializer_list<int> xs) {
  std::vector<std::uint8_t> out;
  for (int x : xs) out.push_back(static_cast<std::uint8_t>(x));
  return out;
}

}  // namespace

TEST_CASE("pack places element 0 in the most significant bits") {
  CHECK(pack(u8({0, 0, 1}), 1).bits == 1);
  CHECK(pack(u8({0, 0, 0}), 3).bits == 0);
  CHECK(pack(u8({0, 0, 0}), 1).bits == 0);
  CHECK(pack(u8({3, 0, 2}), 3).bits == 194);  // 0b011'000'010
}

TEST_CASE("pack rejects out-of-range codes and over-wide packs") {
  CHECK_THROWS_AS(pack(u8({4}), 2), Error);
  CHECK_THROWS_AS(pack(std::vector<std::uint8_t>(9, 0), 8), Error);  // 72 bits
  try {
    pack(u8({2}), 1);
    FAIL("expected CodeOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == errc::code_out_of_range);
  }
  try {
    pack(std::vector<std::uint8_t>(17, 0), 4);
    FAIL("expected PackTooWide");
  } catch (const Error& e) {
    CHECK(e.code() == errc::pack_too_wide);
  }
}

TEST_CASE("unpack inverts pack") {
  CHECK(unpack(PackedVector{3, 1, 1}) == u8({0, 0, 1}));
  CHECK(unpack(PackedVector{4, 2, 0}) == u8({0, 0, 0, 0}));
  CHECK(unpack(PackedVector{3, 3, 194}) == u8({3, 0, 2}));
}

TEST_CASE("pack/unpack round-trips exhaustively up to 16 bits") {
  for (int b = 1; b <= 8; ++b) {
    for (int p = 1; p * b <= 16; ++p) {
      const std::uint64_t space = std::uint64_t{1} << (p * b);
      for (std::uint64_t bits = 0; bits < space; ++bits) {
        const auto codes = unpack(PackedVector{p, b, bits});
        REQUIRE(pack_bits(codes, b) == bits);
      }
    }
  }
}

TEST_CASE("pack/unpack round-trips at the full 64-bit width") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int b = 1 + static_cast<int>(rng() % 8);
    const int p = 64 / b;
    const std::uint64_t bits = b * p == 64 ? rng() : rng() % (std::uint64_t{1} << (b * p));
    const auto codes = unpack(PackedVector{p, b, bits});
    REQUIRE(pack_bits(codes, b) == bits);
  }
}

TEST_CASE("canonicalize sorts stably and records the permutation") {
  SUBCASE("worked example vector") {
    const CanonVector v = canonicalize(u8({3, 0, 2}), 3);
    CHECK(v.sorted_codes == u8({0, 2, 3}));
    CHECK(v.perm_rank == perm_rank(std::vector<int>{1, 2, 0}));
  }
  SUBCASE("already sorted, all equal") {
    const CanonVector v = canonicalize(u8({0, 0, 0}), 3);
    CHECK(v.sorted_codes == u8({0, 0, 0}));
    CHECK(v.perm_rank == 0);
    CHECK(v.multiset_rank == 0);
  }
  SUBCASE("ties keep original order") {
    const CanonVector v = canonicalize(u8({2, 2, 1}), 2);
    CHECK(v.sorted_codes == u8({1, 2, 2}));
    CHECK(v.perm_rank == perm_rank(std::vector<int>{2, 0, 1}));
  }
  SUBCASE("rejects out-of-range codes") {
    CHECK_THROWS_AS(canonicalize(u8({4, 0}), 2), Error);
  }
}

TEST_CASE("canonicalize properties on random vectors") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 3000; ++trial) {
    const int b = 1 + static_cast<int>(rng() % 4);
    const int p = 1 + static_cast<int>(rng() % 8);
    const auto codes = oracles::random_codes(p, b, rng);
    const CanonVector v = canonicalize(codes, b);

    REQUIRE(std::is_sorted(v.sorted_codes.begin(), v.sorted_codes.end()));
    const auto perm = perm_unrank(v.perm_rank, p);
    for (int j = 0; j < p; ++j) {
      REQUIRE(v.sorted_codes[static_cast<std::size_t>(j)] ==
              codes[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
    }
    REQUIRE(multiset_unrank(v.multiset_rank, p, 1u << b) == v.sorted_codes);
  }
}

TEST_CASE("permutation ranks are lexicographic") {
  CHECK(perm_rank(std::vector<int>{0, 1, 2}) == 0);
  CHECK(perm_rank(std::vector<int>{2, 1, 0}) == 5);
  CHECK(perm_unrank(0, 4) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("perm rank/unrank round-trips exhaustively for p <= 6") {
  for (int p = 1; p <= 6; ++p) {
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t position = 0;
    do {
      REQUIRE(perm_rank(perm) == position);
      REQUIRE(perm_unrank(position, p) == perm);
      ++position;
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(position == factorial(static_cast<std::uint32_t>(p)));
  }
}

TEST_CASE("permutation errors") {
  try {
    perm_rank(std::vector<int>{0, 0, 1});
    FAIL("expected NotAPermutation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_a_permutation);
  }
  try {
    perm_unrank(6, 3);
    FAIL("expected RankOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == errc::rank_out_of_range);
  }
}

TEST_CASE("multiset ranks are lexicographic and bijective") {
  CHECK(multiset_rank(u8({0, 0, 0, 0}), 16) == 0);

  for (std::uint32_t alphabet : {2u, 3u, 4u, 8u}) {
    for (int p = 1; p <= 4; ++p) {
      const auto tuples = oracles::enumerate_sorted_tuples(p, alphabet);
      REQUIRE(tuples.size() == multiset_count(p, alphabet));
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        REQUIRE(multiset_rank(tuples[i], alphabet) == i);          // strictly increasing in lex
        REQUIRE(multiset_unrank(i, p, alphabet) == tuples[i]);     // mutual inverse
      }
    }
  }

  // The canonical-column count the size formulas rely on.
  CHECK(multiset_count(3, 8) == 120);
  CHECK(oracles::enumerate_sorted_tuples(3, 8).size() == 120);
}

TEST_CASE("multiset errors") {
  try {
    multiset_rank(u8({1, 0}), 4);
    FAIL("expected NotSorted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_sorted);
  }
  try {
    multiset_unrank(multiset_count(2, 4), 2, 4);
    FAIL("expected RankOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == errc::rank_out_of_range);
  }
}

TEST_CASE("equal activations commute with any weight swap") {
  // Why ties may break arbitrarily: with a_i == a_j, swapping w_i and w_j
  // never changes the dot product. Stability is still fixed for determinism.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int b_w = 1 + static_cast<int>(rng() % 4);
    const int b_a = 1 + static_cast<int>(rng() % 4);
    const int p = 2 + static_cast<int>(rng() % 6);
    const CodeTable wt = symmetric_signed_table(b_w);
    const CodeTable at = symmetric_signed_table(b_a);
    auto wcodes = oracles::random_codes(p, b_w, rng);
    auto acodes = oracles::random_codes(p, b_a, rng);
    const std::size_t i = rng() % p;
    const std::size_t j = rng() % p;
    acodes[j] = acodes[i];
    const std::int64_t before = oracles::dot(wcodes, acodes, wt, at);
    std::swap(wcodes[i], wcodes[j]);
    REQUIRE(oracles::dot(wcodes, acodes, wt, at) == before);
  }
}

TEST_CASE("uniform quantization") {
  const RealMatrix x{1, 4, {0.0, 0.75, -10.0, 10.0}};
  const CodeMatrix q = uniform_quantize(x, 3, 0.25, 0);
  CHECK(q.at(0, 0) == 0);
  CHECK(q.at(0, 1) == 3);   // exact multiple of the scale
  CHECK(q.at(0, 2) == 0);   // clamped low
  CHECK(q.at(0, 3) == 7);   // clamped to 2^b - 1

  SUBCASE("round half away from zero") {
    const RealMatrix half{1, 2, {0.5, 1.5}};
    const CodeMatrix qh = uniform_quantize(half, 3, 1.0, 2);
    CHECK(qh.at(0, 0) == 3);
    CHECK(qh.at(0, 1) == 4);
  }
  SUBCASE("zero point shifts the origin") {
    const RealMatrix v{1, 1, {-0.5}};
    CHECK(uniform_quantize(v, 3, 0.25, 4).at(0, 0) == 2);
  }
  SUBCASE("invalid scale") {
    CHECK_THROWS_AS(uniform_quantize(x, 3, 0.0, 0), Error);
    CHECK_THROWS_AS(dequantize(q, -1.0, 0), Error);
  }
  SUBCASE("dequantize inverts exact multiples") {
    const RealMatrix grid{1, 8, {0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}};
    const CodeMatrix codes = uniform_quantize(grid, 3, 0.25, 0);
    const RealMatrix back = dequantize(codes, 0.25, 0);
    for (std::size_t i = 0; i < grid.data.size(); ++i) REQUIRE(back.data[i] == grid.data[i]);
  }
  SUBCASE("round-trip error is bounded by half a step inside the range") {
    std::mt19937_64 rng(47);
    const int b = 3;
    const double scale = 0.125;
    const std::int32_t zp = 4;
    // Representable interval for b=3, zp=4: codes 0..7 -> x in [-0.5, 0.375].
    RealMatrix x{1, 512, {}};
    x.data.resize(512);
    for (auto& v : x.data) {
      v = -0.5 + 0.875 * (static_cast<double>(rng() % 10000) / 10000.0);
    }
    const RealMatrix back = dequantize(uniform_quantize(x, b, scale, zp), scale, zp);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      REQUIRE(std::abs(back.data[i] - x.data[i]) <= scale / 2 + 1e-12);
    }
  }
}

TEST_CASE("code tables validate their invariants") {
  CHECK_THROWS_AS(make_code_table(2, {1, 2, 3}, std::nullopt), Error);          // wrong size
  CHECK_THROWS_AS(make_code_table(1, {1, 2}, std::uint8_t{0}), Error);          // zero_code != 0
  const CodeTable sym = symmetric_signed_table(3);
  REQUIRE(sym.zero_code.has_value());
  CHECK(sym.values[*sym.zero_code] == 0);
  CHECK(sym.values.front() == -4);
  CHECK(sym.values.back() == 3);
  const CodeTable id = identity_table(2);
  CHECK(id.values == std::vector<std::int32_t>{0, 1, 2, 3});
}

TEST_CASE("code matrices validate codes against the bitwidth") {
  CHECK_THROWS_AS(make_code_matrix(1, 2, 1, {0, 2}), Error);
  CHECK_THROWS_AS(make_code_matrix(2, 2, 2, {0, 1, 2}), Error);  // length mismatch
  std::mt19937_64 rng(3);
  const CodeMatrix m = random_code_matrix(16, 16, 3, rng);
  for (std::uint8_t c : m.data) REQUIRE(c < 8);
}
