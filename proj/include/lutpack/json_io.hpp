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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lutpack/cost_model.hpp"
#include "lutpack/device.hpp"
#include "lutpack/engine.hpp"
#include "lutpack/lut.hpp"
#include "lutpack/pim_sim.hpp"

namespace lutpack {

// Reports use insertion-ordered JSON so identical inputs serialize to
// identical bytes; they are meant to be diffable golden files.
using ojson = nlohmann::ordered_json;

/// Bumped whenever a report or CSV column schema changes.
inline constexpr int kReportFormatVersion = 1;

ojson device_to_json(const DeviceConfig& dev);
/// Accepts a partial object; unspecified keys keep their defaults. The
/// latency constants live under "latency": {"l_d_seconds", "l_local_seconds"};
/// dram_lookup_seconds and mac_seconds re-derive from an overridden l_local
/// unless set explicitly.
DeviceConfig device_from_json(const ojson& j);
DeviceConfig load_device_config(const std::filesystem::path& path);

ojson to_json(const ExecReport& report);
ojson to_json(const Plan& plan);
ojson to_json(const SizeReport& report);
ojson to_json(const SimReport& report, const TilingPlan& plan, bool include_per_bank);

/// CRC32 (IEEE) of the matrix serialized as little-endian int32 words; the
/// stable output fingerprint printed in reports.
std::uint32_t output_crc32(const Int32Matrix& m);

}  // namespace lutpack
