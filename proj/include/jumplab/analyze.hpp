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

// Jump statistics from trajectory ensembles.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "jumplab/rates.hpp"
#include "jumplab/sde.hpp"

namespace jumplab {

inline constexpr double kDefaultEpsilon = 0.1;

/// Streaming telegraph extraction. State i is assigned whenever
/// Q_i >= 1 - epsilon; samples in between are in transit and count towards
/// the previously assigned state. A transition is emitted at the sample
/// where a different state gets assigned.
class JumpDetector {
 public:
  JumpDetector(int dim, double epsilon = kDefaultEpsilon);

  void feed(double t, std::span<const double> q);

  /// Currently assigned state, -1 before the first assignment.
  int state() const noexcept { return state_; }
  /// Time of the most recent assignment change (first assignment included).
  double last_change() const noexcept { return last_change_; }
  bool assigned_now() const noexcept { return assigned_now_; }

  /// nullopt when no state was ever assigned.
  std::optional<StatePath> finish(double horizon) const;

 private:
  int dim_;
  double threshold_;
  int state_ = -1;
  double last_change_ = 0.0;
  double left_at_ = 0.0;
  bool assigned_now_ = false;
  StatePath path_;
};

std::optional<StatePath> detect_jumps(std::span<const double> times,
                                      std::span<const double> q, int dim,
                                      double epsilon = kDefaultEpsilon);
std::optional<StatePath> detect_jumps(const Trajectory& traj,
                                      double epsilon = kDefaultEpsilon);

/// Sufficient statistics of a set of paths; merging is a plain sum.
struct JumpCounts {
  int dim = 0;
  std::vector<std::int64_t> transitions;  // dim x dim, row = from
  std::vector<double> dwell;               // per state
  std::int64_t n_paths = 0;
  std::vector<double> transit_times;

  explicit JumpCounts(int n = 0);
  void add(const StatePath& path);
  void merge(const JumpCounts& other);
  std::int64_t count(int from, int to) const { return transitions[from * dim + to]; }
  std::int64_t total_transitions() const;
};

struct JumpStats {
  int dim = 0;
  JumpCounts counts;
  RMatrix m_hat;         // diagonal = minus row sum
  RMatrix ci_halfwidth;  // 95%; +inf where the dwell total is zero
  std::int64_t n_trajectories = 0;

  /// (m_hat - m) / standard error; NaN where the error is zero.
  RMatrix z_scores(const RateGenerator& analytic) const;
  /// |m_hat - m| <= ci_halfwidth entrywise off the diagonal.
  bool covers(const RateGenerator& analytic) const;
};

/// m_hat(i, j) = N_ij / T_i, half-width 1.96 sqrt(N_ij) / T_i.
/// kEmptyEnsemble if no transition was observed.
JumpStats estimate_generator(const JumpCounts& counts);
JumpStats estimate_generator(std::span<const StatePath> paths);

struct CollapseStats {
  std::vector<double> frequencies;  // sums to 1 exactly
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  /// 99% normal-approximation binomial half-width at frequency p.
  double ci99(double p) const;
};

/// Distribution of the first assigned state. kNoCollapse if a path has no
/// assignment within `window`.
CollapseStats collapse_frequencies(std::span<const StatePath> paths, double window);
CollapseStats collapse_frequencies(std::span<const std::optional<StatePath>> paths,
                                   double window);

struct PhaseMeans {
  int dim = 0;
  std::vector<cplx> mean;   // per pair k < l
  std::vector<double> se_re;
  std::vector<double> se_im;
  std::int64_t samples = 0;
  std::int64_t trajectories = 0;  // contributing
};

/// Average of Y_kl over stored samples with Q_state >= 1 - epsilon and at
/// least burn_in since the last state change (or since t = 0). Standard
/// errors treat each trajectory as one batch. kInsufficientSamples below
/// 100 samples or 2 contributing trajectories.
PhaseMeans conditional_phase_mean(std::span<const QYTrajectory> qy, int state,
                                  double epsilon, double burn_in);

struct MeanQ {
  int dim = 0;
  std::vector<double> times;
  std::vector<double> mean;  // times.size() x dim
  std::vector<double> se;
  std::int64_t n = 0;
};

MeanQ ensemble_mean_q(std::span<const Trajectory> trajectories);

nlohmann::json to_json(const JumpStats& stats);
nlohmann::json to_json(const JumpStats& stats, const RateGenerator& analytic);
nlohmann::json to_json(const CollapseStats& stats);
nlohmann::json to_json(const PhaseMeans& means);

}  // namespace jumplab
