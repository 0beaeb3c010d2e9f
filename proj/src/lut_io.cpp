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

#include "lutpack/lut_io.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>
#include <zlib.h>

namespace lutpack {

namespace {

constexpr std::size_t kHeaderBytes = 32;

void put_u16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v);
  out[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>(in[0] | (in[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

std::uint32_t crc32_of(const std::vector<std::uint8_t>& bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0, bytes.empty() ? Z_NULL : bytes.data(), static_cast<uInt>(bytes.size())));
}

/// Entries serialize in the LUT's current layout order, each value truncated
/// to its entry width, little-endian.
template <typename T>
std::vector<std::uint8_t> encode_entries(const std::vector<T>& entries, int entry_bytes) {
  std::vector<std::uint8_t> bytes(entries.size() * static_cast<std::size_t>(entry_bytes));
  std::size_t o = 0;
  for (T value : entries) {
    const std::uint64_t raw = static_cast<std::uint64_t>(value);
    for (int b = 0; b < entry_bytes; ++b) bytes[o++] = static_cast<std::uint8_t>(raw >> (8 * b));
  }
  return bytes;
}

std::int32_t decode_signed(const std::uint8_t* in, int entry_bytes) {
  std::uint32_t raw = 0;
  for (int b = 0; b < entry_bytes; ++b) raw |= static_cast<std::uint32_t>(in[b]) << (8 * b);
  // Sign-extend from entry_bytes.
  const int shift = 32 - 8 * entry_bytes;
  return shift == 0 ? static_cast<std::int32_t>(raw)
                    : static_cast<std::int32_t>(raw << shift) >> shift;
}

std::uint64_t decode_unsigned(const std::uint8_t* in, int entry_bytes) {
  std::uint64_t raw = 0;
  for (int b = 0; b < entry_bytes; ++b) raw |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  return raw;
}

std::vector<std::uint8_t> header_bytes(LutKind kind, int b_w, int b_a, int p, int entry_bytes,
                                       LutLayout layout, std::uint64_t rows, std::uint64_t cols,
                                       std::uint32_t crc) {
  std::vector<std::uint8_t> h(kHeaderBytes);
  std::memcpy(h.data(), kLutMagic, 4);
  put_u16(h.data() + 4, kLutFormatVersion);
  h[6] = static_cast<std::uint8_t>(kind);
  h[7] = static_cast<std::uint8_t>(b_w);
  h[8] = static_cast<std::uint8_t>(b_a);
  h[9] = static_cast<std::uint8_t>(p);
  h[10] = static_cast<std::uint8_t>(entry_bytes);
  h[11] = static_cast<std::uint8_t>(layout);
  put_u64(h.data() + 12, rows);
  put_u64(h.data() + 20, cols);
  put_u32(h.data() + 28, crc);
  return h;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& header,
                const std::vector<std::uint8_t>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_error(errc::io_error, "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(header.data()),
            static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) {
    throw_error(errc::io_error, "short write to " + path.string());
  }
}

nlohmann::ordered_json table_to_json(const CodeTable& table) {
  nlohmann::ordered_json j;
  j["bitwidth"] = table.bitwidth;
  j["values"] = table.values;
  if (table.zero_code) {
    j["zero_code"] = *table.zero_code;
  } else {
    j["zero_code"] = nullptr;
  }
  return j;
}

CodeTable table_from_json(const nlohmann::ordered_json& j) {
  std::optional<std::uint8_t> zero;
  if (j.contains("zero_code") && !j["zero_code"].is_null()) {
    zero = j["zero_code"].get<std::uint8_t>();
  }
  return make_code_table(j.at("bitwidth").get<int>(),
                         j.at("values").get<std::vector<std::int32_t>>(), zero);
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".tables.json";
  return p;
}

void write_sidecar(const std::filesystem::path& path, const CodeTable& wt, const CodeTable& at) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["weight_table"] = table_to_json(wt);
  j["act_table"] = table_to_json(at);
  std::ofstream out(sidecar_path(path), std::ios::trunc);
  if (!out) {
    throw_error(errc::io_error, "cannot write " + sidecar_path(path).string());
  }
  out << j.dump(2) << "\n";
}

std::pair<CodeTable, CodeTable> read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(sidecar_path(path));
  if (!in) {
    throw_error(errc::io_error, "missing code-table sidecar " + sidecar_path(path).string());
  }
  nlohmann::ordered_json j;
  try {
    in >> j;
    return {table_from_json(j.at("weight_table")), table_from_json(j.at("act_table"))};
  } catch (const nlohmann::json::exception& e) {
    throw_error(errc::io_error, "malformed sidecar " + sidecar_path(path).string() + ": " +
                                    e.what());
  }
}

LutFileHeader parse_header(const std::uint8_t* h) {
  if (std::memcmp(h, kLutMagic, 4) != 0) {
    throw_error(errc::bad_magic, "not a LUT file (bad magic)");
  }
  LutFileHeader header;
  header.version = get_u16(h + 4);
  if (header.version != kLutFormatVersion) {
    throw_error(errc::version_mismatch, "file version " + std::to_string(header.version) +
                                            ", expected " + std::to_string(kLutFormatVersion));
  }
  if (h[6] > 2) {
    throw_error(errc::io_error, "unknown LUT kind " + std::to_string(h[6]));
  }
  header.kind = static_cast<LutKind>(h[6]);
  header.b_w = h[7];
  header.b_a = h[8];
  header.p = h[9];
  header.b_o = h[10];
  if (h[11] > 1) {
    throw_error(errc::io_error, "unknown layout flag " + std::to_string(h[11]));
  }
  header.layout = static_cast<LutLayout>(h[11]);
  header.rows = get_u64(h + 12);
  header.cols = get_u64(h + 20);
  header.entries_crc32 = get_u32(h + 28);
  return header;
}

}  // namespace

void serialize_lut(const PackedLut& lut, const std::filesystem::path& path) {
  const auto payload = encode_entries(lut.entries, lut.b_o);
  write_file(path,
             header_bytes(LutKind::packed, lut.b_w, lut.b_a, lut.p, lut.b_o, lut.layout, lut.rows,
                          lut.cols, crc32_of(payload)),
             payload);
  write_sidecar(path, lut.weight_table, lut.act_table);
}

void serialize_lut(const CanonicalLut& lut, const std::filesystem::path& path) {
  const auto payload = encode_entries(lut.entries, lut.b_o);
  write_file(path,
             header_bytes(LutKind::canonical, lut.b_w, lut.b_a, lut.p, lut.b_o, lut.layout,
                          lut.rows, lut.cols, crc32_of(payload)),
             payload);
  write_sidecar(path, lut.weight_table, lut.act_table);
}

void serialize_lut(const ReorderingLut& lut, const std::filesystem::path& path) {
  const auto payload = encode_entries(lut.entries, lut.entry_bytes);
  write_file(path,
             header_bytes(LutKind::reordering, lut.b_w, 0, lut.p, lut.entry_bytes, lut.layout,
                          lut.rows, lut.cols, crc32_of(payload)),
             payload);
}

LutFileHeader inspect_lut(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(errc::io_error, "cannot open " + path.string());
  }
  std::uint8_t h[kHeaderBytes];
  in.read(reinterpret_cast<char*>(h), kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
    throw_error(errc::io_error, "file shorter than the 32-byte header");
  }
  return parse_header(h);
}

AnyLut deserialize_lut(const std::filesystem::path& path) {
  const LutFileHeader header = inspect_lut(path);
  if (header.b_o < 1 || header.b_o > 8) {
    throw_error(errc::io_error, "entry width " + std::to_string(header.b_o) + " out of range");
  }
  // The header is not covered by the checksum; bound the claimed payload by
  // the actual file size before allocating anything.
  std::error_code ec;
  const std::uintmax_t file_size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw_error(errc::io_error, "cannot stat " + path.string());
  }
  const unsigned __int128 claimed = static_cast<unsigned __int128>(header.rows) * header.cols *
                                    header.b_o;
  if (claimed != file_size - kHeaderBytes) {
    throw_error(errc::checksum_mismatch,
                "entry payload size does not match the header dimensions");
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(errc::io_error, "cannot open " + path.string());
  }
  in.seekg(kHeaderBytes);
  const std::uint64_t entry_count = header.rows * header.cols;
  std::vector<std::uint8_t> payload(entry_count * header.b_o);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    throw_error(errc::checksum_mismatch, "entry payload truncated");
  }
  if (crc32_of(payload) != header.entries_crc32) {
    throw_error(errc::checksum_mismatch, "entry CRC32 does not match the header");
  }

  if (header.kind == LutKind::reordering) {
    ReorderingLut lut;
    lut.p = header.p;
    lut.b_w = header.b_w;
    lut.entry_bytes = header.b_o;
    lut.rows = header.rows;
    lut.cols = header.cols;
    lut.layout = header.layout;
    lut.entries.resize(entry_count);
    for (std::uint64_t i = 0; i < entry_count; ++i) {
      lut.entries[i] = decode_unsigned(payload.data() + i * header.b_o, header.b_o);
    }
    return lut;
  }

  auto [wt, at] = read_sidecar(path);
  std::vector<std::int32_t> entries(entry_count);
  for (std::uint64_t i = 0; i < entry_count; ++i) {
    entries[i] = decode_signed(payload.data() + i * header.b_o, header.b_o);
  }
  if (header.kind == LutKind::packed) {
    PackedLut lut;
    lut.p = header.p;
    lut.b_w = header.b_w;
    lut.b_a = header.b_a;
    lut.b_o = header.b_o;
    lut.rows = header.rows;
    lut.cols = header.cols;
    lut.layout = header.layout;
    lut.weight_table = std::move(wt);
    lut.act_table = std::move(at);
    lut.entries = std::move(entries);
    return lut;
  }
  CanonicalLut lut;
  lut.p = header.p;
  lut.b_w = header.b_w;
  lut.b_a = header.b_a;
  lut.b_o = header.b_o;
  lut.rows = header.rows;
  lut.cols = header.cols;
  lut.layout = header.layout;
  lut.weight_table = std::move(wt);
  lut.act_table = std::move(at);
  lut.entries = std::move(entries);
  return lut;
}

}  // namespace lutpack
