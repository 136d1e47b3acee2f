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

// JSON model files.
//
//   {
//     "dim": 2, "gamma": 10.0, "eta": 1.0,
//     "nu": [[0.5, 0], [-0.5, 0]],
//     "H1": [[[0, 0], [0.5, 0]], [[0.5, 0], [0, 0]]],
//     "H2diag": [0, 0],
//     "Na": [ <matrix>, ... ],
//     "Nbdiag": [ [[re, im], ...], ... ]
//   }
//
// Complex numbers are always [re, im]. H2diag and the Nbdiag entries may
// also be given as full matrices; any nonzero off-diagonal entry is then
// rejected with kNonDiagonalFastTerm.

#pragma once

#include <filesystem>

#include <json.hpp>

#include "jumplab/model.hpp"

namespace jumplab {

cplx complex_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(cplx z);
CMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CMatrix& m);

LindbladModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const LindbladModel& model);

LindbladModel load_model(const std::filesystem::path& path);

}  // namespace jumplab
