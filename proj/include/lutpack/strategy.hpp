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

#include <optional>
#include <string_view>

namespace lutpack {

enum class Strategy {
  naive_mac,         // processing-unit multiply-accumulate, no LUTs
  packed_dram,       // packed LUT resident in the DRAM bank
  packed_buffer,     // packed LUT resident in the local buffer
  canonical_buffer,  // canonical + reordering LUTs fully buffer-resident
  slice_stream,      // bank-resident LUTs, column slices streamed to the buffer
  auto_select,       // resolved to canonical_buffer or slice_stream by the cost model
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

}  // namespace lutpack
