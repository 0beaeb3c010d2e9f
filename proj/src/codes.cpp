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

#include "lutpack/codes.hpp"

#include <cmath>
#include <string>

namespace lutpack {

namespace {

void check_bitwidth(int bitwidth) {
  if (bitwidth < 1 || bitwidth > 8) {
    throw_error(errc::invalid_argument,
                "bitwidth must be in [1, 8], got " + std::to_string(bitwidth));
  }
}

}  // namespace

CodeTable make_code_table(int bitwidth, std::vector<std::int32_t> values,
                          std::optional<std::uint8_t> zero_code) {
  check_bitwidth(bitwidth);
  const std::size_t expected = std::size_t{1} << bitwidth;
  if (values.size() != expected) {
    throw_error(errc::invalid_argument, "code table needs " + std::to_string(expected) +
                                            " values, got " + std::to_string(values.size()));
  }
  if (zero_code) {
    if (*zero_code >= expected || values[*zero_code] != 0) {
      throw_error(errc::invalid_argument, "zero_code does not decode to 0");
    }
  }
  return CodeTable{bitwidth, std::move(values), zero_code};
}

CodeTable identity_table(int bitwidth) {
  check_bitwidth(bitwidth);
  std::vector<std::int32_t> values(std::size_t{1} << bitwidth);
  for (std::size_t c = 0; c < values.size(); ++c) values[c] = static_cast<std::int32_t>(c);
  return CodeTable{bitwidth, std::move(values), std::uint8_t{0}};
}

CodeTable symmetric_signed_table(int bitwidth) {
  check_bitwidth(bitwidth);
  const std::int32_t half = 1 << (bitwidth - 1);
  std::vector<std::int32_t> values(std::size_t{1} << bitwidth);
  for (std::size_t c = 0; c < values.size(); ++c) {
    values[c] = static_cast<std::int32_t>(c) - half;
  }
  return CodeTable{bitwidth, std::move(values), static_cast<std::uint8_t>(half)};
}

CodeMatrix make_code_matrix(std::int64_t rows, std::int64_t cols, int bitwidth,
                            std::vector<std::uint8_t> data) {
  check_bitwidth(bitwidth);
  if (rows < 0 || cols < 0) {
    throw_error(errc::invalid_argument, "matrix dimensions must be non-negative");
  }
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw_error(errc::dimension_mismatch, "data length does not equal rows*cols");
  }
  const unsigned limit = 1u << bitwidth;
  for (std::uint8_t code : data) {
    if (code >= limit) {
      throw_error(errc::code_out_of_range,
                  "code " + std::to_string(code) + " needs more than " +
                      std::to_string(bitwidth) + " bits");
    }
  }
  return CodeMatrix{rows, cols, bitwidth, std::move(data)};
}

CodeMatrix random_code_matrix(std::int64_t rows, std::int64_t cols, int bitwidth,
                              std::mt19937_64& rng) {
  check_bitwidth(bitwidth);
  const std::uint64_t mask = (std::uint64_t{1} << bitwidth) - 1;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (auto& code : data) code = static_cast<std::uint8_t>(rng() & mask);
  return CodeMatrix{rows, cols, bitwidth, std::move(data)};
}

PackedVector pack(std::span<const std::uint8_t> codes, int bitwidth) {
  return PackedVector{static_cast<int>(codes.size()), bitwidth, pack_bits(codes, bitwidth)};
}

std::uint64_t pack_bits(std::span<const std::uint8_t> codes, int bitwidth) {
  check_bitwidth(bitwidth);
  const int p = static_cast<int>(codes.size());
  if (p < 1 || p * bitwidth > 64) {
    throw_error(errc::pack_too_wide,
                "p*bitwidth = " + std::to_string(p * bitwidth) + " does not fit 64 bits");
  }
  const unsigned limit = 1u << bitwidth;
  std::uint64_t bits = 0;
  for (int i = 0; i < p; ++i) {
    if (codes[i] >= limit) {
      throw_error(errc::code_out_of_range, "code " + std::to_string(codes[i]) +
                                               " needs more than " + std::to_string(bitwidth) +
                                               " bits");
    }
    bits |= static_cast<std::uint64_t>(codes[i]) << ((p - 1 - i) * bitwidth);
  }
  return bits;
}

void unpack_bits(std::uint64_t bits, int p, int bitwidth, std::uint8_t* out) {
  const std::uint64_t mask = (std::uint64_t{1} << bitwidth) - 1;
  for (int i = 0; i < p; ++i) {
    out[i] = static_cast<std::uint8_t>((bits >> ((p - 1 - i) * bitwidth)) & mask);
  }
}

std::vector<std::uint8_t> unpack(const PackedVector& v) {
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(v.p));
  unpack_bits(v.bits, v.p, v.bitwidth, codes.data());
  return codes;
}

CodeMatrix uniform_quantize(const RealMatrix& x, int bitwidth, double scale,
                            std::int32_t zero_point) {
  check_bitwidth(bitwidth);
  if (!(scale > 0.0)) {
    throw_error(errc::invalid_scale, "scale must be positive");
  }
  const std::int32_t max_code = (1 << bitwidth) - 1;
  std::vector<std::uint8_t> codes(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    // std::round is round-half-away-from-zero, which keeps the mapping
    // deterministic across platforms.
    double q = std::round(x.data[i] / scale) + zero_point;
    std::uint8_t code = 0;
    if (q >= static_cast<double>(max_code)) {
      code = static_cast<std::uint8_t>(max_code);
    } else if (q > 0.0) {
      code = static_cast<std::uint8_t>(q);
    }
    codes[i] = code;
  }
  return CodeMatrix{x.rows, x.cols, bitwidth, std::move(codes)};
}

RealMatrix dequantize(const CodeMatrix& m, double scale, std::int32_t zero_point) {
  if (!(scale > 0.0)) {
    throw_error(errc::invalid_scale, "scale must be positive");
  }
  RealMatrix out{m.rows, m.cols, std::vector<double>(m.data.size())};
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    out.data[i] = (static_cast<double>(m.data[i]) - zero_point) * scale;
  }
  return out;
}

}  // namespace lutpack
