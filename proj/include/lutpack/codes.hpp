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
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lutpack/errors.hpp"

namespace lutpack {

/// Decode map from b-bit codes to signed integer values. Codes themselves are
/// unsigned indices; signedness (and any numeric format) lives entirely in
/// `values`, which keeps the table machinery format-agnostic.
struct CodeTable {
  int bitwidth = 0;                      // b, in [1, 8]
  std::vector<std::int32_t> values;      // exactly 2^bitwidth entries
  std::optional<std::uint8_t> zero_code; // code whose value is exactly 0, if any
};

CodeTable make_code_table(int bitwidth, std::vector<std::int32_t> values,
                          std::optional<std::uint8_t> zero_code);

/// values[c] = c, zero_code = 0.
CodeTable identity_table(int bitwidth);

/// values[c] = c - 2^(b-1); covers [-2^(b-1), 2^(b-1)-1] and always contains
/// an exact zero (code 2^(b-1)), which padding relies on.
CodeTable symmetric_signed_table(int bitwidth);

inline std::int32_t decode(const CodeTable& table, std::uint8_t code) {
  return table.values[code];
}

/// Dense row-major matrix of codes, each in [0, 2^bitwidth).
struct CodeMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  int bitwidth = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }
  std::uint8_t& at(std::int64_t r, std::int64_t c) { return data[r * cols + c]; }
};

CodeMatrix make_code_matrix(std::int64_t rows, std::int64_t cols, int bitwidth,
                            std::vector<std::uint8_t> data);

/// Uniform codes drawn from the low bits of the generator stream; masking by
/// 2^bitwidth - 1 keeps the draw unbiased and reproducible across platforms.
CodeMatrix random_code_matrix(std::int64_t rows, std::int64_t cols, int bitwidth,
                              std::mt19937_64& rng);

/// Fixed-width bit-packing of a code vector. Element 0 occupies the most
/// significant bit positions, matching left-to-right vector notation.
struct PackedVector {
  int p = 0;
  int bitwidth = 0;
  std::uint64_t bits = 0;
};

PackedVector pack(std::span<const std::uint8_t> codes, int bitwidth);
std::vector<std::uint8_t> unpack(const PackedVector& v);

/// Hot-path variants that skip the struct.
std::uint64_t pack_bits(std::span<const std::uint8_t> codes, int bitwidth);
void unpack_bits(std::uint64_t bits, int p, int bitwidth, std::uint8_t* out);

struct RealMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;
};

/// code = clamp(round(x / scale) + zero_point, 0, 2^b - 1), with
/// round-half-away-from-zero.
CodeMatrix uniform_quantize(const RealMatrix& x, int bitwidth, double scale,
                            std::int32_t zero_point);
RealMatrix dequantize(const CodeMatrix& m, double scale, std::int32_t zero_point);

}  // namespace lutpack
