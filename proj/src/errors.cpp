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

#include "lutpack/errors.hpp"

namespace lutpack {

const char* errc_name(errc code) {
  switch (code) {
    case errc::code_out_of_range: return "CodeOutOfRange";
    case errc::pack_too_wide: return "PackTooWide";
    case errc::not_a_permutation: return "NotAPermutation";
    case errc::rank_out_of_range: return "RankOutOfRange";
    case errc::not_sorted: return "NotSorted";
    case errc::invalid_scale: return "InvalidScale";
    case errc::entry_overflow: return "EntryOverflow";
    case errc::p_too_large: return "PTooLarge";
    case errc::io_error: return "IoError";
    case errc::bad_magic: return "BadMagic";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::checksum_mismatch: return "ChecksumMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::capacity_exceeded: return "CapacityExceeded";
    case errc::infeasible_p: return "InfeasibleP";
    case errc::no_zero_code: return "NoZeroCode";
    case errc::accumulator_overflow: return "AccumulatorOverflow";
    case errc::degenerate_tile: return "DegenerateTile";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace lutpack
