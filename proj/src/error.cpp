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

#include "jumplab/error.hpp"

namespace jumplab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNonHermitian: return "non_hermitian";
    case ErrorCode::kDegenerateSpectrum: return "degenerate_spectrum";
    case ErrorCode::kNonDiagonalFastTerm: return "non_diagonal_fast_term";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kVanishingDelta: return "vanishing_delta";
    case ErrorCode::kNegativeRate: return "negative_rate";
    case ErrorCode::kReducible: return "reducible";
    case ErrorCode::kEmptyEnsemble: return "empty_ensemble";
    case ErrorCode::kNoCollapse: return "no_collapse";
    case ErrorCode::kInsufficientSamples: return "insufficient_samples";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kStabilityGuard: return "stability_guard";
    case ErrorCode::kPositivityBreach: return "positivity_breach";
    case ErrorCode::kInconsistentGenerator: return "inconsistent_generator";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStabilityGuard:
    case ErrorCode::kPositivityBreach:
    case ErrorCode::kInconsistentGenerator:
      return ErrorCategory::kNumerical;
    case ErrorCode::kIo:
      return ErrorCategory::kIo;
    default:
      return ErrorCategory::kValidation;
  }
}

nlohmann::json Error::to_json() const {
  nlohmann::json j;
  j["error"] = std::string(to_string(code_));
  j["message"] = what();
  if (!details_.empty()) j["details"] = details_;
  return j;
}

}  // namespace jumplab
