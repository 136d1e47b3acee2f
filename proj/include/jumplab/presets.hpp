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

// Stock two-level models. Basis |0>, |1> with sigma_z = diag(1, -1);
// |0> is the ground state in the thermal model, sigma_- = |0><1|.

#pragma once

#include "jumplab/model.hpp"

namespace jumplab::presets {

CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();
CMatrix sigma_minus();
CMatrix sigma_plus();

/// N = sigma_z / 2, so O = sigma_z and lambda = (1, -1).
LindbladModel pure_measurement(double gamma, double eta = 1.0);

/// Rabi drive rescaled with the measurement: H1 = u sigma_x / 2, so the
/// physical Hamiltonian is gamma u sigma_x / 2.
LindbladModel rabi(double u, double gamma, double eta = 1.0);

/// Rabi drive at fixed physical frequency omega: gamma H1 = omega sigma_x / 2.
LindbladModel rabi_fixed_omega(double omega, double gamma, double eta = 1.0);

/// Thermal two-level system: H = omega sigma_z / 2 (carried in H1 as
/// omega sigma_z / (2 gamma) when gamma > 0), collapse operators
/// sqrt(lambda p) sigma_- and sqrt(lambda (1-p)) sigma_+, N = sigma_z / 2.
LindbladModel thermal(double lambda, double p, double omega, double gamma,
                      double eta = 1.0);

/// Rabi drive H1 = u sigma_x / 2 measured through N = diag(1, i).
LindbladModel complex_nu_drive(double u, double gamma, double eta = 1.0);

}  // namespace jumplab::presets
