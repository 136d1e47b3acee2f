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

// Integrators for the conditioned state.
//
//  * simulate_sme: first-order integration of the full density matrix,
//    followed by hermitization and trace renormalization every step. Two
//    schemes share the same drift and noise to first order:
//      kEulerMaruyama  rho + drift dt + innovation gamma sqrt(eta) dW
//      kKraus          (M rho M^dag + dt sum_j L_j rho L_j^dag) / trace with
//                      M = I - (i H + K / 2) dt + sqrt(eta) gamma N dy and
//                      dy = sqrt(eta) gamma tr(O rho) dt + dW
//    The plain update leaves the positive cone by O(gamma^2 dt) on nearly
//    pure states; the Kraus form is positive by construction.
//  * simulate_qy: the same process in rescaled variables Q_i = rho_ii and
//    Y_kl = gamma rho_kl, driven by the leading-order tensors only. Each
//    step applies the exact flow of the tensor drift, then the measurement
//    part in Kraus form, then renormalizes.
//  * integrate_lindblad: RK4 on the noise-averaged (Lindblad) equation.
//
// All integrators refuse dt * gamma^2 > kStabilityLimit. The stochastic ones
// abort with kPositivityBreach when the state's smallest eigenvalue drops
// below -kPositivityBreachTol.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "jumplab/decompose.hpp"
#include "jumplab/model.hpp"

namespace jumplab {

inline constexpr double kStabilityLimit = 0.05;
inline constexpr double kPositivityBreachTol = 1e-6;

/// Called with the populations after every integration step (and once at
/// t = 0). Used for online jump detection at full time resolution.
using StepObserver = std::function<void(double t, std::span<const double> q)>;

enum class SmeScheme { kEulerMaruyama, kKraus };
std::string_view to_string(SmeScheme scheme);
SmeScheme scheme_from_string(std::string_view name);

/// One Euler-Maruyama step of the stochastic master equation.
DensityMatrix step_sme(const DensityMatrix& rho, const ValidatedModel& model,
                       double dt, double dW);

/// Allocation-free SME stepper working in place on a row-major dim x dim
/// buffer. The linear drift is precomputed as a dim^2 x dim^2 superoperator.
class SmeStepper {
 public:
  SmeStepper(const ValidatedModel& model, double dt,
             SmeScheme scheme = SmeScheme::kKraus);

  int dim() const noexcept { return dim_; }
  double dt() const noexcept { return dt_; }

  SmeScheme scheme() const noexcept { return scheme_; }

  /// Advances rho by one step with Wiener increment dW. Returns the trace
  /// defect before renormalization.
  double step(std::span<cplx> rho, double dW);

  /// gamma tr(O rho) dt + eta^{-1/2} dW for the current rho.
  double record_increment(std::span<const cplx> rho, double dW) const;

 private:
  double step_euler(std::span<cplx> rho, double dW);
  double step_kraus(std::span<cplx> rho, double dW);

  int dim_;
  SmeScheme scheme_;
  double dt_;
  double noise_scale_;  // gamma sqrt(eta)
  double record_scale_;  // eta^{-1/2}
  double gamma_;
  std::vector<cplx> super_;  // dt * generator (Euler) or dt * jump map (Kraus);
                             // rows (k,l) with k <= l only are used
  std::vector<cplx> m0_;     // I - (i H + K / 2) dt
  std::vector<cplx> nu_;
  std::vector<double> lambda_;
  std::vector<cplx> scratch_;
  std::vector<cplx> half_;
};

struct Trajectory {
  int dim = 0;
  double dt = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> q;       // times.size() x dim
  std::vector<cplx> rho;       // times.size() x dim x dim, when requested
  std::vector<double> record;  // cumulative x_t
  std::vector<double> recent_times;  // last full-rate samples, oldest first
  std::vector<double> recent_q;
  double max_trace_defect = 0.0;

  std::size_t size() const { return times.size(); }
  std::span<const double> q_at(std::size_t n) const {
    return {q.data() + n * dim, static_cast<std::size_t>(dim)};
  }
};

struct SmeOptions {
  SmeScheme scheme = SmeScheme::kKraus;
  bool store_rho = false;
  std::size_t recent_capacity = 0;
  StepObserver observer;
};

/// Integrates over round(horizon / dt) steps with dW ~ N(0, dt) drawn from a
/// stream seeded by `seed`; stores every `decimation`-th sample (t = 0
/// included). Step errors are rethrown with the failing time and seed.
Trajectory simulate_sme(const ValidatedModel& model, const DensityMatrix& rho0,
                        double dt, double horizon, std::uint64_t seed,
                        int decimation = 100, const SmeOptions& options = {});

struct QYTrajectory {
  int dim = 0;
  double dt = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> q;       // times.size() x dim
  std::vector<cplx> y;         // times.size() x pairs, pairs k < l lexicographic
  std::vector<double> record;  // cumulative x_t

  int pairs() const { return dim * (dim - 1) / 2; }
  std::size_t size() const { return times.size(); }
  std::span<const double> q_at(std::size_t n) const {
    return {q.data() + n * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const cplx> y_at(std::size_t n) const {
    return {y.data() + n * pairs(), static_cast<std::size_t>(pairs())};
  }
};

/// Index of pair (k, l), k < l, in lexicographic order.
int pair_index(int dim, int k, int l);

struct QyOptions {
  int decimation = 1;
  std::vector<cplx> u0;  // initial rho_kl for k < l; Y(0) = gamma u0
  StepObserver observer;
};

QYTrajectory simulate_qy(const SuperoperatorTensors& tensors,
                         const MeasurementSetup& setup, std::span<const double> q0,
                         double dt, double horizon, std::uint64_t seed,
                         const QyOptions& options = {});

struct LindbladPath {
  std::vector<double> times;
  std::vector<CMatrix> states;
};

/// Classical RK4 on d rho = L(rho) dt + gamma^2 L_N(rho) dt.
LindbladPath integrate_lindblad(const ValidatedModel& model,
                                const DensityMatrix& rho0, double dt,
                                double horizon, int decimation = 1);

void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(std::ostream& out, const QYTrajectory& traj);

}  // namespace jumplab
