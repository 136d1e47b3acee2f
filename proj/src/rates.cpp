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

#include "jumplab/rates.hpp"

#include <cmath>
#include <random>
#include <string>

#include "jumplab/error.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

namespace {

void check_probability_vector(std::span<const double> q, int dim) {
  if (static_cast<int>(q.size()) != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "probability vector has wrong length",
                {{"got", q.size()}, {"dim", dim}});
  }
  double s = 0.0;
  for (double v : q) {
    if (!(v >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities do not sum to 1",
                {{"sum", s}});
  }
}

}  // namespace

RateGenerator::RateGenerator(const RMatrix& rates) : m_(rates) {
  if (rates.rows() != rates.cols() || rates.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "rate matrix must be square");
  }
  const auto n = m_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double out = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double& r = m_(i, j);
      if (!std::isfinite(r)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite rate",
                    {{"from", i}, {"to", j}});
      }
      if (r < -kNegativeRateTol) {
        throw Error(ErrorCode::kNegativeRate,
                    "negative jump rate " + std::to_string(r) + " for " +
                        std::to_string(i) + " -> " + std::to_string(j),
                    {{"from", i}, {"to", j}, {"rate", r}});
      }
      if (r < 0.0) r = 0.0;
      out += r;
    }
    m_(i, i) = -out;
  }
}

RateGenerator RateGenerator::zero(int dim) {
  return RateGenerator(RMatrix::Zero(dim, dim));
}

std::vector<double> StatePath::dwell_totals() const {
  std::vector<double> totals(dim, 0.0);
  for (std::size_t s = 0; s < points.size(); ++s) {
    const double end = s + 1 < points.size() ? points[s + 1].time : horizon;
    totals[points[s].state] += end - points[s].time;
  }
  return totals;
}

cplx delta(int k, int l, const SuperoperatorTensors& tensors,
           const MeasurementSetup& setup) {
  const int n = tensors.dim;
  if (k == l || k < 0 || l < 0 || k >= n || l >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "delta needs two distinct pointer indices",
                {{"k", k}, {"l", l}, {"dim", n}});
  }
  if (static_cast<int>(setup.nu.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "setup and tensors disagree on dimension");
  }
  const cplx nk = setup.nu[k];
  const cplx nl = setup.nu[l];
  return 0.5 * (std::norm(nk) + std::norm(nl) - 2.0 * nk * std::conj(nl)) +
         tensors.damping(k, l);
}

RateGenerator jump_rates(const SuperoperatorTensors& t, const MeasurementSetup& setup) {
  const int n = t.dim;
  // Delta_kl for k < l, checked only where the phase channel is active.
  std::vector<cplx> deltas(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const cplx dkl = delta(k, l, t, setup);
      deltas[k * n + l] = dkl;
      bool active = false;
      for (int i = 0; i < n && !active; ++i) {
        active = t.c(i, k, l) != cplx(0.0, 0.0) || t.b(k, l, i) != cplx(0.0, 0.0);
      }
      if (active && dkl.real() <= 1e-12) {
        throw Error(ErrorCode::kVanishingDelta,
                    "Re Delta_" + std::to_string(k) + std::to_string(l) +
                        " vanishes on an active phase channel",
                    {{"k", k}, {"l", l}, {"re", dkl.real()}, {"im", dkl.imag()}});
      }
    }
  }

  RMatrix full(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          const cplx cb = t.c(i, k, l) * t.b(k, l, j);
          if (cb != cplx(0.0, 0.0)) s += cb / deltas[k * n + l];
        }
      }
      full(i, j) = t.A(i, j) + 2.0 * s.real();
    }
  }

  RateGenerator gen(full);
  for (int i = 0; i < n; ++i) {
    if (std::abs(gen(i, i) - full(i, i)) > 1e-10) {
      throw Error(ErrorCode::kInconsistentGenerator,
                  "rate formula on the diagonal disagrees with the row sum",
                  {{"state", i}, {"formula", full(i, i)}, {"row_sum", gen(i, i)}});
    }
  }
  return gen;
}

std::vector<double> stationary(const RateGenerator& gen) {
  const int n = gen.dim();
  const Eigen::MatrixXd mt = gen.matrix().transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mt);
  lu.setThreshold(1e-12);
  if (lu.rank() < n - 1) {
    throw Error(ErrorCode::kReducible,
                "generator has more than one stationary distribution",
                {{"rank", lu.rank()}, {"dim", n}});
  }
  Eigen::MatrixXd sys(n + 1, n);
  sys.topRows(n) = mt;
  sys.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = sys.colPivHouseholderQr().solve(rhs);

  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (pi(i) < 0.0) pi(i) = 0.0;
    s += pi(i);
  }
  pi /= s;
  const double residual = (mt * pi).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, gen.matrix().cwiseAbs().maxCoeff());
  if (residual > 1e-10 * scale) {
    throw Error(ErrorCode::kReducible, "stationary solve did not converge",
                {{"residual", residual}});
  }
  return {pi.data(), pi.data() + n};
}

StatePath markov_sample(const RateGenerator& gen, std::span<const double> q0,
                        double horizon, std::uint64_t seed) {
  const int n = gen.dim();
  check_probability_vector(q0, n);
  if (!(horizon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be positive",
                {{"horizon", horizon}});
  }
  Rng rng(seed);
  StatePath path;
  path.dim = n;
  path.horizon = horizon;

  std::discrete_distribution<int> initial(q0.begin(), q0.end());
  int state = initial(rng);
  double t = 0.0;
  path.points.push_back({t, state});

  std::vector<double> weights(n);
  while (true) {
    const double exit = gen.exit_rate(state);
    if (exit <= 0.0) break;
    t += std::exponential_distribution<double>(exit)(rng);
    if (t >= horizon) break;
    for (int j = 0; j < n; ++j) weights[j] = j == state ? 0.0 : gen(state, j);
    state = std::discrete_distribution<int>(weights.begin(), weights.end())(rng);
    path.points.push_back({t, state});
  }
  return path;
}

nlohmann::json to_json(const RateGenerator& gen) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < gen.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < gen.dim(); ++j) row.push_back(gen(i, j));
    rows.push_back(std::move(row));
  }
  return {{"dim", gen.dim()}, {"matrix", std::move(rows)}};
}

}  // namespace jumplab
