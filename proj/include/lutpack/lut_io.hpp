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
#include <filesystem>
#include <variant>

#include "lutpack/lut.hpp"

namespace lutpack {

// Binary LUT file, little-endian throughout:
//   magic "LCLT" (4B) | version u16 | kind u8 | b_w u8 | b_a u8 | p u8 |
//   b_o u8 | layout u8 | rows u64 | cols u64 | crc32(entries) u32 |
//   raw entries (rows * cols * b_o bytes, in the recorded layout order)
// Packed and canonical LUTs carry their code tables in a JSON sidecar at
// "<path>.tables.json"; the reordering LUT has none (it is table-free).

inline constexpr std::uint16_t kLutFormatVersion = 1;
inline constexpr char kLutMagic[4] = {'L', 'C', 'L', 'T'};

enum class LutKind : std::uint8_t { packed = 0, canonical = 1, reordering = 2 };

struct LutFileHeader {
  std::uint16_t version = 0;
  LutKind kind = LutKind::packed;
  std::uint8_t b_w = 0;
  std::uint8_t b_a = 0;
  std::uint8_t p = 0;
  std::uint8_t b_o = 0;
  LutLayout layout = LutLayout::row_major;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint32_t entries_crc32 = 0;
};

void serialize_lut(const PackedLut& lut, const std::filesystem::path& path);
void serialize_lut(const CanonicalLut& lut, const std::filesystem::path& path);
void serialize_lut(const ReorderingLut& lut, const std::filesystem::path& path);

using AnyLut = std::variant<PackedLut, CanonicalLut, ReorderingLut>;
AnyLut deserialize_lut(const std::filesystem::path& path);

/// Reads and validates only the 32-byte header; entries stay on disk.
LutFileHeader inspect_lut(const std::filesystem::path& path);

}  // namespace lutpack
