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

// Experiment configuration.
//
//   {
//     "model": { ...model document... } | "path/to/model.json",
//     "run": {
//       "dt": 2e-4 | "auto",            // auto: 0.02 / gamma^2
//       "horizon": 20,
//       "n_trajectories": 500,
//       "master_seed": 1,
//       "decimation": 100,
//       "epsilon": 0.1,
//       "burn_in": "auto",              // auto: 10 / (gamma^2 min Re Delta)
//       "rho0": [[...]] | "initial_q": [...],   // default: maximally mixed
//       "collapse_window": 5,           // default: horizon
//       "scheme": "kraus" | "euler_maruyama"
//     },
//     "outputs": {"dir": "runs/x", "save_trajectories": false, "save_qy": false},
//     "zeno": {"gammas": [2, 4], "fixed_horizon": "auto" | 200}
//   }
//
// Relative paths resolve against the directory of the config file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "jumplab/decompose.hpp"
#include "jumplab/model.hpp"
#include "jumplab/sde.hpp"

namespace jumplab::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kAutoDtFactor = 0.02;
inline constexpr double kAutoBurnInFactor = 10.0;
inline constexpr double kAutoHorizonDwells = 50.0;

struct RunSettings {
  std::optional<double> dt;  // nullopt: auto
  double horizon = 10.0;
  int n_trajectories = 1;
  std::uint64_t master_seed = 0;
  int decimation = 100;
  double epsilon = 0.1;
  std::optional<double> burn_in;  // nullopt: auto
  std::optional<CMatrix> rho0;    // nullopt: maximally mixed
  std::optional<double> collapse_window;
  SmeScheme scheme = SmeScheme::kKraus;
};

struct OutputSettings {
  std::filesystem::path dir = "jumplab_run";
  bool save_trajectories = false;
  bool save_qy = false;
};

struct ZenoSettings {
  std::vector<double> gammas;
  std::optional<double> fixed_horizon;  // nullopt: auto, 50 predicted dwells
};

struct ExperimentConfig {
  LindbladModel model;
  RunSettings run;
  OutputSettings outputs;
  ZenoSettings zeno;
  nlohmann::json source;  // the document as read, model inlined
};

ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

double resolve_dt(const RunSettings& run, double gamma);
double resolve_burn_in(const RunSettings& run, const SuperoperatorTensors& tensors,
                       const MeasurementSetup& setup);
DensityMatrix initial_state(const RunSettings& run, int dim);

}  // namespace jumplab::cli
