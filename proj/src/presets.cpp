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

#include "jumplab/presets.hpp"

#include <cmath>

namespace jumplab::presets {

namespace {

LindbladModel two_level(double gamma, double eta) {
  LindbladModel m;
  m.dim = 2;
  m.H1 = CMatrix::Zero(2, 2);
  m.H2diag = {0.0, 0.0};
  m.setup = {2, {cplx(0.5, 0.0), cplx(-0.5, 0.0)}, gamma, eta};
  return m;
}

}  // namespace

CMatrix sigma_x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

CMatrix sigma_y() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = cplx(0.0, -1.0);
  m(1, 0) = cplx(0.0, 1.0);
  return m;
}

CMatrix sigma_z() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

LindbladModel pure_measurement(double gamma, double eta) {
  return two_level(gamma, eta);
}

LindbladModel rabi(double u, double gamma, double eta) {
  LindbladModel m = two_level(gamma, eta);
  m.H1 = 0.5 * u * sigma_x();
  return m;
}

LindbladModel rabi_fixed_omega(double omega, double gamma, double eta) {
  LindbladModel m = two_level(gamma, eta);
  if (gamma > 0.0) m.H1 = (0.5 * omega / gamma) * sigma_x();
  return m;
}

LindbladModel thermal(double lambda, double p, double omega, double gamma,
                      double eta) {
  LindbladModel m = two_level(gamma, eta);
  if (gamma > 0.0) m.H1 = (0.5 * omega / gamma) * sigma_z();
  m.Na = {std::sqrt(lambda * p) * sigma_minus(),
          std::sqrt(lambda * (1.0 - p)) * sigma_plus()};
  return m;
}

LindbladModel complex_nu_drive(double u, double gamma, double eta) {
  LindbladModel m = two_level(gamma, eta);
  m.H1 = 0.5 * u * sigma_x();
  m.setup.nu = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
  return m;
}

}  // namespace jumplab::presets
