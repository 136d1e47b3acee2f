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

#include "jumplab/sde.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "jumplab/error.hpp"
#include "jumplab/rates.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

namespace {

void check_step_size(double dt, double gamma) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be positive", {{"dt", dt}});
  }
  if (dt * gamma * gamma > kStabilityLimit) {
    throw Error(ErrorCode::kStabilityGuard,
                "dt * gamma^2 = " + std::to_string(dt * gamma * gamma) +
                    " exceeds " + std::to_string(kStabilityLimit),
                {{"dt", dt}, {"gamma", gamma}, {"limit", kStabilityLimit}});
  }
}

std::int64_t step_count(double dt, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be positive",
                {{"horizon", horizon}});
  }
  const double steps = std::round(horizon / dt);
  if (steps < 1.0 || steps > 1e9) {
    throw Error(ErrorCode::kInvalidArgument,
                "horizon / dt must lie in [1, 1e9]",
                {{"horizon", horizon}, {"dt", dt}});
  }
  return static_cast<std::int64_t>(steps);
}

// Throws kPositivityBreach when the smallest eigenvalue of the Hermitian
// row-major matrix is below -kPositivityBreachTol. `work` holds dim^2 entries.
void check_positivity(std::span<const cplx> rho, int dim, std::span<cplx> work) {
  double lmin = 0.0;
  if (dim == 1) {
    lmin = rho[0].real();
  } else if (dim == 2) {
    const double a = rho[0].real();
    const double b = rho[3].real();
    lmin = 0.5 * (a + b) - std::hypot(0.5 * (a - b), std::abs(rho[1]));
  } else {
    // Cholesky of rho + tol I succeeds iff the smallest eigenvalue exceeds -tol.
    for (int i = 0; i < dim * dim; ++i) work[i] = rho[i];
    for (int i = 0; i < dim; ++i) work[i * dim + i] += kPositivityBreachTol;
    bool ok = true;
    for (int j = 0; j < dim && ok; ++j) {
      double diag = work[j * dim + j].real();
      for (int k = 0; k < j; ++k) diag -= std::norm(work[j * dim + k]);
      if (!(diag > 0.0)) {
        ok = false;
        break;
      }
      const double ljj = std::sqrt(diag);
      work[j * dim + j] = ljj;
      for (int i = j + 1; i < dim; ++i) {
        cplx s = work[i * dim + j];
        for (int k = 0; k < j; ++k) s -= work[i * dim + k] * std::conj(work[j * dim + k]);
        work[i * dim + j] = s / ljj;
      }
    }
    if (ok) return;
    CMatrix m(dim, dim);
    for (int i = 0; i < dim * dim; ++i) m.data()[i] = rho[i];
    lmin = min_eigenvalue(hermitize(m));
  }
  if (lmin < -kPositivityBreachTol) {
    throw Error(ErrorCode::kPositivityBreach,
                "state lost positivity (min eigenvalue " + std::to_string(lmin) +
                    "); reduce dt",
                {{"min_eigenvalue", lmin}});
  }
}

void annotate(Error& e, double t, std::uint64_t seed) {
  e.details()["time"] = t;
  e.details()["seed"] = seed;
}

}  // namespace

// --- reference step ---------------------------------------------------------

DensityMatrix step_sme(const DensityMatrix& rho, const ValidatedModel& model,
                       double dt, double dW) {
  check_step_size(dt, model.gamma());
  const double s = model.gamma() * std::sqrt(model.eta());
  CMatrix next = rho.matrix() + drift(rho, model) * dt + innovation(rho, model) * (s * dW);
  next = hermitize(next);
  next /= next.trace().real();
  std::vector<cplx> work(next.size());
  check_positivity({next.data(), static_cast<std::size_t>(next.size())}, model.dim(), work);
  return DensityMatrix::trusted(std::move(next));
}

// --- fast stepper -----------------------------------------------------------

std::string_view to_string(SmeScheme scheme) {
  return scheme == SmeScheme::kKraus ? "kraus" : "euler_maruyama";
}

SmeScheme scheme_from_string(std::string_view name) {
  if (name == "kraus") return SmeScheme::kKraus;
  if (name == "euler_maruyama" || name == "euler") return SmeScheme::kEulerMaruyama;
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(name) + "'",
              {{"scheme", name}, {"allowed", {"kraus", "euler_maruyama"}}});
}

namespace {

// dt * map as a dim^2 x dim^2 row-major table, built column by column from
// the images of the matrix units.
template <class Map>
std::vector<cplx> tabulate(int d, double dt, Map&& map) {
  const int d2 = d * d;
  std::vector<cplx> out(static_cast<std::size_t>(d2) * d2, 0.0);
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      const CMatrix g = map(unit(d, p, q));
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) out[(k * d + l) * d2 + (p * d + q)] = dt * g(k, l);
      }
    }
  }
  return out;
}

}  // namespace

SmeStepper::SmeStepper(const ValidatedModel& model, double dt, SmeScheme scheme)
    : dim_(model.dim()),
      scheme_(scheme),
      dt_(dt),
      noise_scale_(model.gamma() * std::sqrt(model.eta())),
      record_scale_(1.0 / std::sqrt(model.eta())),
      gamma_(model.gamma()),
      nu_(model.setup().nu),
      lambda_(model.lambda()) {
  check_step_size(dt, model.gamma());
  const int d = dim_;
  const double g2 = gamma_ * gamma_;
  scratch_.assign(d * d, 0.0);
  half_.assign(2 * d * d, 0.0);
  if (scheme_ == SmeScheme::kEulerMaruyama) {
    super_ = tabulate(d, dt, [&](const CMatrix& x) { return apply_generator(x, model); });
    return;
  }

  const LindbladModel& m = model.model();
  const CMatrix& n = model.measurement_operator();
  CMatrix h = gamma_ * m.H1;
  for (int k = 0; k < d; ++k) h(k, k) += g2 * m.H2diag[k];
  CMatrix kk = g2 * (n.adjoint() * n);
  for (const CMatrix& na : m.Na) kk += na.adjoint() * na;
  std::vector<CMatrix> nb;
  for (const auto& diag : m.Nbdiag) {
    nb.push_back(diagonal(std::span<const cplx>(diag)));
    kk += g2 * (nb.back().adjoint() * nb.back());
  }
  const CMatrix m0 = identity(d) - (cplx(0.0, 1.0) * h + 0.5 * kk) * dt;
  m0_.assign(m0.data(), m0.data() + d * d);

  const double unmeasured = g2 * (1.0 - model.eta());
  super_ = tabulate(d, dt, [&](const CMatrix& x) {
    CMatrix out = unmeasured * (n * x * n.adjoint());
    for (const CMatrix& na : m.Na) out += na * x * na.adjoint();
    for (const CMatrix& b : nb) out += g2 * (b * x * b.adjoint());
    return out;
  });
}

double SmeStepper::step(std::span<cplx> rho, double dW) {
  return scheme_ == SmeScheme::kKraus ? step_kraus(rho, dW) : step_euler(rho, dW);
}

double SmeStepper::step_kraus(std::span<cplx> rho, double dW) {
  const int d = dim_;
  const int d2 = d * d;
  double expect_o = 0.0;
  for (int k = 0; k < d; ++k) expect_o += lambda_[k] * rho[k * d + k].real();
  // sqrt(eta) gamma dy, with dy the efficiency-weighted record increment.
  const double c = noise_scale_ * (noise_scale_ * expect_o * dt_ + dW);

  cplx* mk = half_.data();
  cplx* mr = half_.data() + d2;
  std::copy(m0_.begin(), m0_.end(), mk);
  for (int k = 0; k < d; ++k) mk[k * d + k] += c * nu_[k];
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      cplx acc = 0.0;
      for (int p = 0; p < d; ++p) acc += mk[k * d + p] * rho[p * d + l];
      mr[k * d + l] = acc;
    }
  }
  double trace = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      const int row = k * d + l;
      cplx acc = 0.0;
      for (int p = 0; p < d; ++p) acc += mr[k * d + p] * std::conj(mk[l * d + p]);
      const cplx* s = super_.data() + static_cast<std::size_t>(row) * d2;
      for (int p = 0; p < d2; ++p) acc += s[p] * rho[p];
      scratch_[row] = acc;
    }
    trace += scratch_[k * d + k].real();
  }
  const double inv = 1.0 / trace;
  for (int k = 0; k < d; ++k) {
    rho[k * d + k] = cplx(scratch_[k * d + k].real() * inv, 0.0);
    for (int l = k + 1; l < d; ++l) {
      const cplx v = scratch_[k * d + l] * inv;
      rho[k * d + l] = v;
      rho[l * d + k] = std::conj(v);
    }
  }
  check_positivity(rho, d, scratch_);
  return std::abs(trace - 1.0);
}

double SmeStepper::step_euler(std::span<cplx> rho, double dW) {
  const int d = dim_;
  const int d2 = d * d;
  double expect_o = 0.0;
  for (int k = 0; k < d; ++k) expect_o += lambda_[k] * rho[k * d + k].real();
  const double sdw = noise_scale_ * dW;

  // The update maps Hermitian matrices to Hermitian matrices; only the upper
  // triangle is computed and mirrored, which is the hermitized step.
  double trace = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      const int row = k * d + l;
      const cplx* s = super_.data() + static_cast<std::size_t>(row) * d2;
      cplx acc = 0.0;
      for (int p = 0; p < d2; ++p) acc += s[p] * rho[p];
      const cplx phase = nu_[k] + std::conj(nu_[l]) - expect_o;
      scratch_[row] = rho[row] + acc + sdw * phase * rho[row];
    }
    trace += scratch_[k * d + k].real();
  }
  const double inv = 1.0 / trace;
  for (int k = 0; k < d; ++k) {
    rho[k * d + k] = cplx(scratch_[k * d + k].real() * inv, 0.0);
    for (int l = k + 1; l < d; ++l) {
      const cplx v = scratch_[k * d + l] * inv;
      rho[k * d + l] = v;
      rho[l * d + k] = std::conj(v);
    }
  }
  check_positivity(rho, d, scratch_);
  return std::abs(trace - 1.0);
}

double SmeStepper::record_increment(std::span<const cplx> rho, double dW) const {
  double expect_o = 0.0;
  for (int k = 0; k < dim_; ++k) expect_o += lambda_[k] * rho[k * dim_ + k].real();
  return gamma_ * expect_o * dt_ + record_scale_ * dW;
}

// --- trajectories -----------------------------------------------------------

Trajectory simulate_sme(const ValidatedModel& model, const DensityMatrix& rho0,
                        double dt, double horizon, std::uint64_t seed,
                        int decimation, const SmeOptions& options) {
  if (decimation < 1) {
    throw Error(ErrorCode::kInvalidArgument, "decimation must be >= 1",
                {{"decimation", decimation}});
  }
  if (rho0.dim() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state has wrong dimension");
  }
  SmeStepper stepper(model, dt, options.scheme);
  const std::int64_t steps = step_count(dt, horizon);
  const int d = model.dim();

  Trajectory traj;
  traj.dim = d;
  traj.dt = dt;
  traj.gamma = model.gamma();
  traj.seed = seed;
  const std::size_t stored = static_cast<std::size_t>(steps / decimation) + 1;
  traj.times.reserve(stored);
  traj.q.reserve(stored * d);
  traj.record.reserve(stored);

  std::vector<cplx> rho(rho0.matrix().data(), rho0.matrix().data() + d * d);
  std::vector<double> q(d);
  const std::size_t ring = options.recent_capacity;
  std::vector<double> ring_t(ring);
  std::vector<double> ring_q(ring * d);
  std::size_t ring_next = 0;
  std::size_t ring_size = 0;

  double x = 0.0;
  auto store = [&](double t) {
    traj.times.push_back(t);
    traj.q.insert(traj.q.end(), q.begin(), q.end());
    traj.record.push_back(x);
    if (options.store_rho) traj.rho.insert(traj.rho.end(), rho.begin(), rho.end());
  };
  auto observe = [&](double t) {
    for (int k = 0; k < d; ++k) q[k] = rho[k * d + k].real();
    if (ring > 0) {
      ring_t[ring_next] = t;
      std::copy(q.begin(), q.end(), ring_q.begin() + ring_next * d);
      ring_next = (ring_next + 1) % ring;
      ring_size = std::min(ring_size + 1, ring);
    }
    if (options.observer) options.observer(t, q);
  };

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  observe(0.0);
  store(0.0);
  std::int64_t n = 0;
  try {
    for (n = 1; n <= steps; ++n) {
      const double dW = normal(rng);
      x += stepper.record_increment(rho, dW);
      const double defect = stepper.step(rho, dW);
      traj.max_trace_defect = std::max(traj.max_trace_defect, defect);
      const double t = static_cast<double>(n) * dt;
      observe(t);
      if (n % decimation == 0) store(t);
    }
  } catch (Error& e) {
    annotate(e, static_cast<double>(n) * dt, seed);
    throw;
  }

  if (ring_size > 0) {
    const std::size_t first = ring_size < ring ? 0 : ring_next;
    for (std::size_t i = 0; i < ring_size; ++i) {
      const std::size_t slot = (first + i) % ring;
      traj.recent_times.push_back(ring_t[slot]);
      traj.recent_q.insert(traj.recent_q.end(), ring_q.begin() + slot * d,
                           ring_q.begin() + (slot + 1) * d);
    }
  }
  return traj;
}

int pair_index(int dim, int k, int l) {
  // Pairs (0,1), (0,2), ..., (0,d-1), (1,2), ...
  return k * (2 * dim - k - 1) / 2 + (l - k - 1);
}

QYTrajectory simulate_qy(const SuperoperatorTensors& t, const MeasurementSetup& setup,
                         std::span<const double> q0, double dt, double horizon,
                         std::uint64_t seed, const QyOptions& options) {
  const int d = t.dim;
  const double gamma = setup.gamma;
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rescaled integration needs gamma > 0",
                {{"gamma", gamma}});
  }
  if (static_cast<int>(setup.nu.size()) != d || static_cast<int>(q0.size()) != d) {
    throw Error(ErrorCode::kDimensionMismatch, "tensors, setup and q0 disagree on dimension");
  }
  if (options.decimation < 1) {
    throw Error(ErrorCode::kInvalidArgument, "decimation must be >= 1");
  }
  check_step_size(dt, gamma);
  const std::int64_t steps = step_count(dt, horizon);
  const int np = d * (d - 1) / 2;
  if (!options.u0.empty() && static_cast<int>(options.u0.size()) != np) {
    throw Error(ErrorCode::kDimensionMismatch, "u0 must hold one entry per pair k < l");
  }

  const std::vector<double> lambda = setup.lambda();
  const double root_eta = std::sqrt(setup.eta);
  const double g2 = gamma * gamma;
  const int d2 = d * d;

  // Leading-order drift on rho = (Q, U = Y / gamma), without the
  // measurement part of Delta, propagated exactly over one step.
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(d2, d2);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) gen(j * d + j, i * d + i) = t.A(i, j);
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        if (k != l) gen(j * d + j, k * d + l) = gamma * t.b(k, l, j);
      }
    }
  }
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      if (k == l) continue;
      for (int i = 0; i < d; ++i) gen(k * d + l, i * d + i) = gamma * t.c(i, k, l);
      gen(k * d + l, k * d + l) = -g2 * t.damping(k, l);
    }
  }
  const Eigen::MatrixXcd prop = (gen * dt).exp();

  // Measurement: rho -> M rho M^dag + (1 - eta) gamma^2 dt N rho N^dag with
  // M = I - gamma^2 |nu|^2 dt / 2 + sqrt(eta) gamma nu dy, all diagonal.
  std::vector<double> decay(d);
  for (int k = 0; k < d; ++k) decay[k] = 1.0 - 0.5 * g2 * std::norm(setup.nu[k]) * dt;
  const double unmeasured = g2 * (1.0 - setup.eta) * dt;

  Eigen::VectorXcd rho = Eigen::VectorXcd::Zero(d2);
  Eigen::VectorXcd next(d2);
  for (int i = 0; i < d; ++i) rho(i * d + i) = q0[i];
  for (int k = 0; k < d && !options.u0.empty(); ++k) {
    for (int l = k + 1; l < d; ++l) {
      rho(k * d + l) = options.u0[pair_index(d, k, l)];
      rho(l * d + k) = std::conj(options.u0[pair_index(d, k, l)]);
    }
  }
  std::vector<double> q(q0.begin(), q0.end());
  std::vector<cplx> y(np, 0.0);
  std::vector<cplx> m(d);
  std::vector<cplx> work(d2);

  QYTrajectory traj;
  traj.dim = d;
  traj.dt = dt;
  traj.gamma = gamma;
  traj.seed = seed;
  double x = 0.0;
  auto sync = [&] {
    for (int i = 0; i < d; ++i) q[i] = rho(i * d + i).real();
    for (int k = 0; k < d; ++k) {
      for (int l = k + 1; l < d; ++l) y[pair_index(d, k, l)] = gamma * rho(k * d + l);
    }
  };
  auto store = [&](double time) {
    traj.times.push_back(time);
    traj.q.insert(traj.q.end(), q.begin(), q.end());
    traj.y.insert(traj.y.end(), y.begin(), y.end());
    traj.record.push_back(x);
  };

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  sync();
  if (options.observer) options.observer(0.0, q);
  store(0.0);
  std::int64_t n = 0;
  try {
    for (n = 1; n <= steps; ++n) {
      const double dW = normal(rng);
      double expect_o = 0.0;
      for (int k = 0; k < d; ++k) expect_o += lambda[k] * q[k];
      x += gamma * expect_o * dt + dW / root_eta;
      const double c = root_eta * gamma * (root_eta * gamma * expect_o * dt + dW);
      for (int k = 0; k < d; ++k) m[k] = decay[k] + c * setup.nu[k];

      next.noalias() = prop * rho;
      double trace = 0.0;
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          const cplx v = next(k * d + l);
          next(k * d + l) = m[k] * v * std::conj(m[l]) +
                            unmeasured * setup.nu[k] * v * std::conj(setup.nu[l]);
        }
        trace += next(k * d + k).real();
      }
      const double inv = 1.0 / trace;
      for (int k = 0; k < d; ++k) {
        rho(k * d + k) = next(k * d + k).real() * inv;
        for (int l = k + 1; l < d; ++l) {
          rho(k * d + l) = 0.5 * (next(k * d + l) + std::conj(next(l * d + k))) * inv;
          rho(l * d + k) = std::conj(rho(k * d + l));
        }
      }
      check_positivity({rho.data(), static_cast<std::size_t>(d2)}, d, work);
      sync();

      const double time = static_cast<double>(n) * dt;
      if (options.observer) options.observer(time, q);
      if (n % options.decimation == 0) store(time);
    }
  } catch (Error& e) {
    annotate(e, static_cast<double>(n) * dt, seed);
    throw;
  }
  return traj;
}

// --- noise-averaged evolution ----------------------------------------------

LindbladPath integrate_lindblad(const ValidatedModel& model, const DensityMatrix& rho0,
                                double dt, double horizon, int decimation) {
  check_step_size(dt, model.gamma());
  if (decimation < 1) {
    throw Error(ErrorCode::kInvalidArgument, "decimation must be >= 1");
  }
  const std::int64_t steps = step_count(dt, horizon);
  const int d = model.dim();
  const int d2 = d * d;
  Eigen::MatrixXcd super(d2, d2);
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      const CMatrix g = apply_generator(unit(d, p, q), model);
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) super(k * d + l, p * d + q) = g(k, l);
      }
    }
  }

  Eigen::VectorXcd v(d2);
  for (int i = 0; i < d2; ++i) v(i) = rho0.matrix().data()[i];
  LindbladPath path;
  auto store = [&](double t) {
    CMatrix m(d, d);
    for (int i = 0; i < d2; ++i) m.data()[i] = v(i);
    path.times.push_back(t);
    path.states.push_back(std::move(m));
  };
  store(0.0);
  for (std::int64_t n = 1; n <= steps; ++n) {
    const Eigen::VectorXcd k1 = super * v;
    const Eigen::VectorXcd k2 = super * (v + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = super * (v + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = super * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (n % decimation == 0 || n == steps) store(static_cast<double>(n) * dt);
  }
  cplx trace = 0.0;
  for (int k = 0; k < d; ++k) trace += v(k * d + k);
  if (std::abs(trace - 1.0) > 1e-10) {
    throw Error(ErrorCode::kInconsistentGenerator,
                "noise-averaged evolution lost trace",
                {{"trace_defect", std::abs(trace - 1.0)}});
  }
  return path;
}

// --- CSV --------------------------------------------------------------------

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (int k = 0; k < traj.dim; ++k) out << ",Q_" << k;
  out << ",x\n";
  out << std::setprecision(15);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out << traj.times[n];
    for (double v : traj.q_at(n)) out << ',' << v;
    out << ',' << traj.record[n] << '\n';
  }
}

void write_csv(std::ostream& out, const QYTrajectory& traj) {
  out << "t";
  for (int k = 0; k < traj.dim; ++k) out << ",Q_" << k;
  out << ",x";
  for (int k = 0; k < traj.dim; ++k) {
    for (int l = k + 1; l < traj.dim; ++l) out << ",ReY_" << k << l << ",ImY_" << k << l;
  }
  out << '\n' << std::setprecision(15);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out << traj.times[n];
    for (double v : traj.q_at(n)) out << ',' << v;
    out << ',' << traj.record[n];
    for (const cplx& y : traj.y_at(n)) out << ',' << y.real() << ',' << y.imag();
    out << '\n';
  }
}

}  // namespace jumplab
