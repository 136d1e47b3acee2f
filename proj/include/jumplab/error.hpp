// Copyright 2026 The jumplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace jumplab {

enum class ErrorCode {
  // validation
  kDimensionMismatch,
  kNonHermitian,
  kDegenerateSpectrum,
  kNonDiagonalFastTerm,
  kInvalidArgument,
  kInvalidState,
  kVanishingDelta,
  kNegativeRate,
  kReducible,
  kEmptyEnsemble,
  kNoCollapse,
  kInsufficientSamples,
  kUsage,
  // numerical
  kStabilityGuard,
  kPositivityBreach,
  kInconsistentGenerator,
  // io
  kIo,
};

enum class ErrorCategory { kValidation, kNumerical, kIo };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

/// Library-wide exception. `details` carries machine-readable context
/// (offending indices, failing time, seed) for the CLI error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }
  nlohmann::json& details() noexcept { return details_; }

  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace jumplab
