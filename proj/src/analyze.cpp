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

#include "jumplab/analyze.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

constexpr double kZ95 = 1.96;
constexpr double kZ99 = 2.576;

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json matrix_json(const RMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(finite_or_null(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

// --- detection --------------------------------------------------------------

JumpDetector::JumpDetector(int dim, double epsilon)
    : dim_(dim), threshold_(1.0 - epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in (0, 0.5)",
                {{"epsilon", epsilon}});
  }
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  path_.dim = dim;
}

void JumpDetector::feed(double t, std::span<const double> q) {
  int hit = -1;
  for (int i = 0; i < dim_; ++i) {
    if (q[i] >= threshold_) {
      hit = i;
      break;
    }
  }
  if (hit < 0) {
    if (assigned_now_) left_at_ = t;
    assigned_now_ = false;
    return;
  }
  if (state_ < 0) {
    state_ = hit;
    last_change_ = t;
    path_.points.push_back({t, hit});
  } else if (hit != state_) {
    path_.transit_times.push_back(t - left_at_);
    state_ = hit;
    last_change_ = t;
    path_.points.push_back({t, hit});
  }
  assigned_now_ = true;
}

std::optional<StatePath> JumpDetector::finish(double horizon) const {
  if (path_.points.empty()) return std::nullopt;
  StatePath out = path_;
  out.horizon = horizon;
  return out;
}

std::optional<StatePath> detect_jumps(std::span<const double> times,
                                      std::span<const double> q, int dim,
                                      double epsilon) {
  if (q.size() != times.size() * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "q path does not match the time grid");
  }
  JumpDetector det(dim, epsilon);
  for (std::size_t n = 0; n < times.size(); ++n) {
    det.feed(times[n], q.subspan(n * dim, dim));
  }
  return det.finish(times.empty() ? 0.0 : times.back());
}

std::optional<StatePath> detect_jumps(const Trajectory& traj, double epsilon) {
  return detect_jumps(traj.times, traj.q, traj.dim, epsilon);
}

// --- counts and estimation --------------------------------------------------

JumpCounts::JumpCounts(int n)
    : dim(n), transitions(static_cast<std::size_t>(n) * n, 0), dwell(n, 0.0) {}

void JumpCounts::add(const StatePath& path) {
  if (path.dim != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "path dimension differs from counts");
  }
  for (std::size_t s = 1; s < path.points.size(); ++s) {
    ++transitions[path.points[s - 1].state * dim + path.points[s].state];
  }
  const std::vector<double> totals = path.dwell_totals();
  for (int i = 0; i < dim; ++i) dwell[i] += totals[i];
  transit_times.insert(transit_times.end(), path.transit_times.begin(),
                       path.transit_times.end());
  ++n_paths;
}

void JumpCounts::merge(const JumpCounts& other) {
  if (other.dim != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot merge counts of different dimension");
  }
  for (std::size_t k = 0; k < transitions.size(); ++k) transitions[k] += other.transitions[k];
  for (int i = 0; i < dim; ++i) dwell[i] += other.dwell[i];
  transit_times.insert(transit_times.end(), other.transit_times.begin(),
                       other.transit_times.end());
  n_paths += other.n_paths;
}

std::int64_t JumpCounts::total_transitions() const {
  return std::accumulate(transitions.begin(), transitions.end(), std::int64_t{0});
}

JumpStats estimate_generator(const JumpCounts& counts) {
  if (counts.total_transitions() == 0) {
    throw Error(ErrorCode::kEmptyEnsemble, "no transitions observed in the ensemble",
                {{"paths", counts.n_paths}});
  }
  const int n = counts.dim;
  JumpStats stats;
  stats.dim = n;
  stats.counts = counts;
  stats.n_trajectories = counts.n_paths;
  stats.m_hat = RMatrix::Zero(n, n);
  stats.ci_halfwidth = RMatrix::Zero(n, n);
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = counts.dwell[i];
    double out = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = static_cast<double>(counts.count(i, j));
      if (t > 0.0) {
        stats.m_hat(i, j) = c / t;
        stats.ci_halfwidth(i, j) = kZ95 * std::sqrt(c) / t;
      } else {
        stats.ci_halfwidth(i, j) = inf;
      }
      out += stats.m_hat(i, j);
    }
    stats.m_hat(i, i) = -out;
  }
  return stats;
}

JumpStats estimate_generator(std::span<const StatePath> paths) {
  if (paths.empty()) throw Error(ErrorCode::kEmptyEnsemble, "no paths given");
  JumpCounts counts(paths.front().dim);
  for (const StatePath& p : paths) counts.add(p);
  return estimate_generator(counts);
}

RMatrix JumpStats::z_scores(const RateGenerator& analytic) const {
  RMatrix z = RMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double se = ci_halfwidth(i, j) / kZ95;
      if (i == j || !(se > 0.0) || !std::isfinite(se)) {
        z(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        z(i, j) = (m_hat(i, j) - analytic(i, j)) / se;
      }
    }
  }
  return z;
}

bool JumpStats::covers(const RateGenerator& analytic) const {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i != j && std::abs(m_hat(i, j) - analytic(i, j)) > ci_halfwidth(i, j)) return false;
    }
  }
  return true;
}

// --- collapse ---------------------------------------------------------------

double CollapseStats::ci99(double p) const {
  return n > 0 ? kZ99 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

namespace {

CollapseStats collapse_impl(std::size_t n, int dim,
                            const std::function<const StatePath*(std::size_t)>& at,
                            double window) {
  if (n == 0) throw Error(ErrorCode::kEmptyEnsemble, "no paths given");
  CollapseStats stats;
  stats.counts.assign(dim, 0);
  std::int64_t missing = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const StatePath* p = at(k);
    if (p == nullptr || p->points.empty() || p->points.front().time > window) {
      ++missing;
      continue;
    }
    ++stats.counts[p->points.front().state];
  }
  if (missing > 0) {
    throw Error(ErrorCode::kNoCollapse,
                std::to_string(missing) + " of " + std::to_string(n) +
                    " paths did not collapse within the window",
                {{"missing", missing}, {"paths", n}, {"window", window}});
  }
  stats.n = static_cast<std::int64_t>(n);
  stats.frequencies.assign(dim, 0.0);
  double head = 0.0;
  for (int i = 0; i + 1 < dim; ++i) {
    stats.frequencies[i] = static_cast<double>(stats.counts[i]) / static_cast<double>(n);
    head += stats.frequencies[i];
  }
  stats.frequencies[dim - 1] = 1.0 - head;
  return stats;
}

}  // namespace

CollapseStats collapse_frequencies(std::span<const StatePath> paths, double window) {
  const int dim = paths.empty() ? 0 : paths.front().dim;
  return collapse_impl(paths.size(), dim,
                       [&](std::size_t k) { return &paths[k]; }, window);
}

CollapseStats collapse_frequencies(std::span<const std::optional<StatePath>> paths,
                                   double window) {
  int dim = 0;
  for (const auto& p : paths) {
    if (p) {
      dim = p->dim;
      break;
    }
  }
  if (dim == 0 && !paths.empty()) {
    throw Error(ErrorCode::kNoCollapse, "no path collapsed", {{"paths", paths.size()}});
  }
  return collapse_impl(paths.size(), dim,
                       [&](std::size_t k) { return paths[k] ? &*paths[k] : nullptr; },
                       window);
}

// --- conditional phases -----------------------------------------------------

PhaseMeans conditional_phase_mean(std::span<const QYTrajectory> qy, int state,
                                  double epsilon, double burn_in) {
  if (!(burn_in > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "burn_in must be positive",
                {{"burn_in", burn_in}});
  }
  if (qy.empty()) {
    throw Error(ErrorCode::kInsufficientSamples, "no trajectories given");
  }
  const int dim = qy.front().dim;
  if (state < 0 || state >= dim) {
    throw Error(ErrorCode::kInvalidArgument, "state index out of range", {{"state", state}});
  }
  const int np = dim * (dim - 1) / 2;

  // Per-trajectory batch sums.
  std::vector<std::vector<cplx>> sums;
  std::vector<std::int64_t> sizes;
  for (const QYTrajectory& tr : qy) {
    if (tr.dim != dim) throw Error(ErrorCode::kDimensionMismatch, "mixed dimensions");
    JumpDetector det(dim, epsilon);
    std::vector<cplx> s(np, 0.0);
    std::int64_t c = 0;
    for (std::size_t n = 0; n < tr.size(); ++n) {
      const double t = tr.times[n];
      det.feed(t, tr.q_at(n));
      if (det.state() != state || !det.assigned_now()) continue;
      const double since = det.last_change() > 0.0 ? t - det.last_change() : t;
      if (since < burn_in) continue;
      const auto y = tr.y_at(n);
      for (int p = 0; p < np; ++p) s[p] += y[p];
      ++c;
    }
    if (c > 0) {
      sums.push_back(std::move(s));
      sizes.push_back(c);
    }
  }

  const std::int64_t total = std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
  if (total < 100 || sizes.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "only " + std::to_string(total) + " qualifying samples in " +
                    std::to_string(sizes.size()) + " trajectories",
                {{"samples", total}, {"trajectories", sizes.size()}});
  }

  PhaseMeans out;
  out.dim = dim;
  out.samples = total;
  out.trajectories = static_cast<std::int64_t>(sizes.size());
  out.mean.assign(np, 0.0);
  out.se_re.assign(np, 0.0);
  out.se_im.assign(np, 0.0);
  const double nb = static_cast<double>(sizes.size());
  const double ct = static_cast<double>(total);
  for (int p = 0; p < np; ++p) {
    cplx s = 0.0;
    for (const auto& b : sums) s += b[p];
    const cplx mean = s / ct;
    double vr = 0.0;
    double vi = 0.0;
    for (std::size_t b = 0; b < sums.size(); ++b) {
      const cplx r = sums[b][p] - mean * static_cast<double>(sizes[b]);
      vr += r.real() * r.real();
      vi += r.imag() * r.imag();
    }
    const double scale = nb / (nb - 1.0) / (ct * ct);
    out.mean[p] = mean;
    out.se_re[p] = std::sqrt(vr * scale);
    out.se_im[p] = std::sqrt(vi * scale);
  }
  return out;
}

// --- ensemble means ---------------------------------------------------------

MeanQ ensemble_mean_q(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw Error(ErrorCode::kEmptyEnsemble, "no trajectories given");
  const Trajectory& first = trajectories.front();
  MeanQ out;
  out.dim = first.dim;
  out.times = first.times;
  out.n = static_cast<std::int64_t>(trajectories.size());
  const std::size_t len = first.q.size();
  std::vector<double> s(len, 0.0), s2(len, 0.0);
  for (const Trajectory& tr : trajectories) {
    if (tr.dim != first.dim || tr.times != first.times) {
      throw Error(ErrorCode::kInvalidArgument, "trajectories do not share a time grid",
                  {{"seed", tr.seed}});
    }
    for (std::size_t k = 0; k < len; ++k) {
      s[k] += tr.q[k];
      s2[k] += tr.q[k] * tr.q[k];
    }
  }
  const double n = static_cast<double>(out.n);
  out.mean.resize(len);
  out.se.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    out.mean[k] = s[k] / n;
    const double var = n > 1.0 ? std::max(0.0, (s2[k] - n * out.mean[k] * out.mean[k]) / (n - 1.0))
                               : 0.0;
    out.se[k] = std::sqrt(var / n);
  }
  return out;
}

// --- JSON -------------------------------------------------------------------

nlohmann::json to_json(const JumpStats& stats) {
  nlohmann::json counts = nlohmann::json::array();
  for (int i = 0; i < stats.dim; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < stats.dim; ++j) row.push_back(stats.counts.count(i, j));
    counts.push_back(std::move(row));
  }
  const auto& tt = stats.counts.transit_times;
  const double mean_transit =
      tt.empty() ? std::numeric_limits<double>::quiet_NaN()
                 : std::accumulate(tt.begin(), tt.end(), 0.0) / static_cast<double>(tt.size());
  return {{"dim", stats.dim},
          {"n_trajectories", stats.n_trajectories},
          {"transition_counts", std::move(counts)},
          {"dwell_time_totals", stats.counts.dwell},
          {"m_hat", matrix_json(stats.m_hat)},
          {"ci_halfwidth", matrix_json(stats.ci_halfwidth)},
          {"mean_transit_time", finite_or_null(mean_transit)}};
}

nlohmann::json to_json(const JumpStats& stats, const RateGenerator& analytic) {
  nlohmann::json j = to_json(stats);
  j["analytic"] = matrix_json(analytic.matrix());
  j["z_scores"] = matrix_json(stats.z_scores(analytic));
  return j;
}

nlohmann::json to_json(const CollapseStats& stats) {
  return {{"frequencies", stats.frequencies},
          {"counts", stats.counts},
          {"n", stats.n}};
}

nlohmann::json to_json(const PhaseMeans& means) {
  nlohmann::json pairs = nlohmann::json::array();
  int p = 0;
  for (int k = 0; k < means.dim; ++k) {
    for (int l = k + 1; l < means.dim; ++l, ++p) {
      pairs.push_back({{"k", k},
                       {"l", l},
                       {"mean", {means.mean[p].real(), means.mean[p].imag()}},
                       {"se", {means.se_re[p], means.se_im[p]}}});
    }
  }
  return {{"pairs", std::move(pairs)},
          {"samples", means.samples},
          {"trajectories", means.trajectories}};
}

}  // namespace jumplab
