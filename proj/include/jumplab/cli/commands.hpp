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

// Subcommands of the jumplab executable. The run_* and *_report functions do
// the work without touching the file system; cmd_* add the output files.
// Exit codes: 0 ok, 1 I/O, 2 validation or usage, 3 numerical failure.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumplab/analyze.hpp"
#include "jumplab/cli/config.hpp"
#include "jumplab/error.hpp"

namespace jumplab::cli {

int exit_code(ErrorCode code);

/// The rates.json document: generator, stationary distribution, mechanism
/// report and Delta table.
nlohmann::json analytic_block(const ValidatedModel& model);

struct TrajectoryFailure {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  nlohmann::json error;  // Error::to_json()
};

struct SmeEnsemble {
  double dt = 0.0;
  double horizon = 0.0;  // steps * dt
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<Trajectory>> trajectories;  // nullopt where failed
  std::vector<std::optional<StatePath>> paths;  // nullopt: failed or no collapse
  std::vector<TrajectoryFailure> failures;

  std::vector<Trajectory> completed() const;
  /// Counts over the collapsed paths of completed trajectories.
  JumpCounts counts(int dim) const;
  std::int64_t no_collapse() const;
};

/// Runs run.n_trajectories SME trajectories with seeds
/// stream_seed(master_seed, n) and detects jumps at full time resolution.
SmeEnsemble run_sme_ensemble(const ValidatedModel& model, const RunSettings& run,
                             int workers = 0);

struct QyEnsemble {
  std::vector<std::optional<QYTrajectory>> trajectories;
  std::vector<TrajectoryFailure> failures;
  std::vector<QYTrajectory> completed() const;
};

QyEnsemble run_qy_ensemble(const ValidatedModel& model, const RunSettings& run,
                           int workers = 0);

struct SimulationReport {
  nlohmann::json summary;
  nlohmann::json analytic;
  std::optional<MeanQ> mean_q;
  SmeEnsemble ensemble;
  std::optional<QyEnsemble> qy;
  int exit_code = 0;
};

SimulationReport simulate_report(const ExperimentConfig& config, int workers = 0);

struct ZenoRow {
  double gamma = 0.0;
  double dt = 0.0;
  double fixed_horizon = 0.0;
  std::int64_t fixed_transitions = 0;
  double fixed_mean_dwell = 0.0;
  double fixed_mean_dwell_se = 0.0;
  double fixed_predicted_dwell = 0.0;
  std::int64_t rescaled_transitions = 0;
  double rescaled_rate = 0.0;
  double rescaled_rate_se = 0.0;
  double rescaled_predicted_rate = 0.0;
  std::int64_t failures = 0;
};

/// For each gamma: the Hamiltonian of the base model held fixed in physical
/// units (H1 scaled by gamma_base / gamma) and held fixed in rescaled units.
/// Mean dwell is total dwell over total transitions; the rate is its inverse.
std::vector<ZenoRow> zeno_sweep(const ExperimentConfig& config,
                                std::span<const double> gammas, int workers = 0);

int cmd_rates(const ExperimentConfig& config, std::ostream& log);
int cmd_simulate(const ExperimentConfig& config, std::ostream& log, std::ostream& err);
int cmd_zeno(const ExperimentConfig& config, std::span<const double> gammas,
             std::ostream& log, std::ostream& err);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace jumplab::cli
