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

// The measured open system, written in the eigenbasis of the measured
// observable O = N + N^dagger with N = diag(nu).
//
// The system generator is split by its order in the measurement strength
// gamma:
//
//   L(rho) = -i[gamma H1 + gamma^2 diag(H2diag), rho]
//            + sum_a L_{Na}(rho) + gamma^2 sum_b L_{diag(Nb)}(rho)
//
// and the conditioned state obeys
//
//   d rho = L(rho) dt + gamma^2 L_N(rho) dt + gamma sqrt(eta) D_N(rho) dW
//   dx    = gamma tr(O rho) dt + eta^{-1/2} dW

#pragma once

#include <vector>

#include "jumplab/matcore.hpp"

namespace jumplab {

struct MeasurementSetup {
  int dim = 0;
  std::vector<cplx> nu;  // diagonal of N
  double gamma = 0.0;    // measurement rate is gamma^2
  double eta = 1.0;      // detector efficiency, (0, 1]

  /// lambda_k = 2 Re nu_k, the eigenvalues of O.
  std::vector<double> lambda() const;
};

struct LindbladModel {
  int dim = 0;
  CMatrix H1;                            // order gamma, Hermitian
  std::vector<double> H2diag;            // order gamma^2, diagonal
  std::vector<CMatrix> Na;               // order 1 collapse operators
  std::vector<std::vector<cplx>> Nbdiag;  // order gamma^2, diagonal
  MeasurementSetup setup;
};

class ValidatedModel;
ValidatedModel validate_model(LindbladModel model);

/// A model that passed validate_model. Immutable; safe to share between
/// trajectory workers.
class ValidatedModel {
 public:
  const LindbladModel& model() const noexcept { return model_; }
  const MeasurementSetup& setup() const noexcept { return model_.setup; }
  int dim() const noexcept { return model_.dim; }
  double gamma() const noexcept { return model_.setup.gamma; }
  double eta() const noexcept { return model_.setup.eta; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }
  const CMatrix& measurement_operator() const noexcept { return n_; }

 private:
  friend ValidatedModel validate_model(LindbladModel model);
  explicit ValidatedModel(LindbladModel model);

  LindbladModel model_;
  std::vector<double> lambda_;
  CMatrix n_;
};

/// Tolerances shared by the density-matrix invariants.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-8;

class DensityMatrix {
 public:
  /// Checks Hermiticity, unit trace and positivity; kInvalidState otherwise.
  explicit DensityMatrix(CMatrix rho);

  /// Skips validation. For integrators that run their own monitors.
  static DensityMatrix trusted(CMatrix rho);

  static DensityMatrix pointer(int dim, int k);
  static DensityMatrix from_probabilities(std::span<const double> q);
  static DensityMatrix maximally_mixed(int dim);

  const CMatrix& matrix() const noexcept { return rho_; }
  int dim() const noexcept { return static_cast<int>(rho_.rows()); }
  double population(int k) const { return rho_(k, k).real(); }
  std::vector<double> populations() const;

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix rho, Unchecked) : rho_(std::move(rho)) {}
  CMatrix rho_;
};

/// Full linear generator at finite gamma, including the gamma^2 L_N term,
/// applied to an arbitrary matrix.
CMatrix apply_generator(const CMatrix& x, const ValidatedModel& model);

/// The same generator without the gamma^2 L_N measurement term.
CMatrix apply_system_generator(const CMatrix& x, const ValidatedModel& model);

/// Deterministic part of the stochastic master equation.
CMatrix drift(const DensityMatrix& rho, const ValidatedModel& model);

/// D_N(rho) = N rho + rho N^dagger - rho tr(O rho)
CMatrix innovation(const DensityMatrix& rho, const ValidatedModel& model);

/// gamma tr(O rho) dt + eta^{-1/2} dW
double record_increment(const DensityMatrix& rho, const ValidatedModel& model,
                        double dW, double dt);

}  // namespace jumplab
