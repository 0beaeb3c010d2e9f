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
#include <stdexcept>
#include <string>

namespace lutpack {

enum class errc {
  code_out_of_range,
  pack_too_wide,
  not_a_permutation,
  rank_out_of_range,
  not_sorted,
  invalid_scale,
  entry_overflow,
  p_too_large,
  io_error,
  bad_magic,
  version_mismatch,
  checksum_mismatch,
  dimension_mismatch,
  capacity_exceeded,
  infeasible_p,
  no_zero_code,
  accumulator_overflow,
  degenerate_tile,
  invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

/// Capacity failures report how many bytes were requested against which
/// budget, so callers can tell exactly how far a plan is from fitting.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& tier, std::uint64_t required_bytes, std::uint64_t budget_bytes)
      : Error(errc::capacity_exceeded,
              tier + " requires " + std::to_string(required_bytes) + " B but budget is " +
                  std::to_string(budget_bytes) + " B (deficit " +
                  std::to_string(required_bytes - budget_bytes) + " B)"),
        tier_(tier),
        required_(required_bytes),
        budget_(budget_bytes) {}

  const std::string& tier() const { return tier_; }
  std::uint64_t required_bytes() const { return required_; }
  std::uint64_t budget_bytes() const { return budget_; }
  std::uint64_t deficit_bytes() const { return required_ - budget_; }

 private:
  std::string tier_;
  std::uint64_t required_;
  std::uint64_t budget_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace lutpack
