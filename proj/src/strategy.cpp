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

#include "lutpack/strategy.hpp"

namespace lutpack {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::naive_mac: return "naive_mac";
    case Strategy::packed_dram: return "packed_dram";
    case Strategy::packed_buffer: return "packed_buffer";
    case Strategy::canonical_buffer: return "canonical_buffer";
    case Strategy::slice_stream: return "slice_stream";
    case Strategy::auto_select: return "auto";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  if (name == "naive_mac" || name == "naive") return Strategy::naive_mac;
  if (name == "packed_dram") return Strategy::packed_dram;
  if (name == "packed_buffer") return Strategy::packed_buffer;
  if (name == "canonical_buffer") return Strategy::canonical_buffer;
  if (name == "slice_stream") return Strategy::slice_stream;
  if (name == "auto") return Strategy::auto_select;
  return std::nullopt;
}

}  // namespace lutpack
