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

// Dense complex matrices for few-level systems.
//
// Storage is bounded at kMaxDim x kMaxDim and lives inline, so temporaries
// never touch the heap. Everything here is a pure function of its inputs.

#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace jumplab {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 16;

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor, kMaxDim, kMaxDim>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor, kMaxDim, kMaxDim>;

/// Square zero matrix; throws kInvalidArgument outside [1, kMaxDim].
CMatrix zeros(int dim);
CMatrix identity(int dim);
/// |k><k|
CMatrix projector(int dim, int k);
/// |row><col|
CMatrix unit(int dim, int row, int col);
CMatrix diagonal(std::span<const cplx> entries);
CMatrix diagonal(std::span<const double> entries);

/// (M + M^dagger) / 2, assembled so that r(j,i) == conj(r(i,j)) bit-for-bit.
CMatrix hermitize(const CMatrix& m);

struct HermitianDefect {
  double value = 0.0;  // max |M_ij - conj(M_ji)|
  int row = 0;
  int col = 0;
};
HermitianDefect hermitian_defect(const CMatrix& m);

/// Smallest eigenvalue of a Hermitian matrix. Input must be Hermitian to
/// 1e-10; otherwise kNonHermitian naming the worst entry pair.
double min_eigenvalue(const CMatrix& h);

/// AB - BA; kDimensionMismatch on unequal dims.
CMatrix commutator(const CMatrix& a, const CMatrix& b);
/// AB + BA
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

/// L_M(rho) = M rho M^dagger - 1/2 {M^dagger M, rho}
CMatrix dissipator(const CMatrix& m, const CMatrix& rho);

void require_square(const CMatrix& m, const char* what);

}  // namespace jumplab
