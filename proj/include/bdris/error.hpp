// SPDX-License-Identifier: Apache-2.0
//
// bdris-meta: learned optimization for BD-RIS assisted uplink RSMA
// Copyright (C) 2026 bdris-meta contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDRIS_ERROR_HPP
#define BDRIS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bdris {

enum class ErrorCode {
  InvalidArgument,
  Dimension,
  Disconnected,
  Diverged,
  DegenerateProjection,
  OracleTooLarge,
  Parse,
  Io,
};

// All library failures are reported through this exception type; the C API
// maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bdris

#endif  // BDRIS_ERROR_HPP
