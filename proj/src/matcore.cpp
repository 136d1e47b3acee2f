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

#include "jumplab/matcore.hpp"

#include <cmath>
#include <string>

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument,
                "matrix dimension " + std::to_string(dim) + " outside [1, " +
                    std::to_string(kMaxDim) + "]",
                {{"dim", dim}});
  }
}

void check_same_dims(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix dimensions differ: " + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.rows()),
                {{"lhs", a.rows()}, {"rhs", b.rows()}});
  }
}

}  // namespace

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " is not square",
                {{"rows", m.rows()}, {"cols", m.cols()}});
  }
  check_dim(static_cast<int>(m.rows()));
}

CMatrix zeros(int dim) {
  check_dim(dim);
  return CMatrix::Zero(dim, dim);
}

CMatrix identity(int dim) {
  check_dim(dim);
  return CMatrix::Identity(dim, dim);
}

CMatrix projector(int dim, int k) { return unit(dim, k, k); }

CMatrix unit(int dim, int row, int col) {
  CMatrix m = zeros(dim);
  if (row < 0 || row >= dim || col < 0 || col >= dim) {
    throw Error(ErrorCode::kInvalidArgument, "basis index out of range",
                {{"dim", dim}, {"row", row}, {"col", col}});
  }
  m(row, col) = 1.0;
  return m;
}

CMatrix diagonal(std::span<const cplx> entries) {
  const int dim = static_cast<int>(entries.size());
  CMatrix m = zeros(dim);
  for (int k = 0; k < dim; ++k) m(k, k) = entries[k];
  return m;
}

CMatrix diagonal(std::span<const double> entries) {
  const int dim = static_cast<int>(entries.size());
  CMatrix m = zeros(dim);
  for (int k = 0; k < dim; ++k) m(k, k) = entries[k];
  return m;
}

CMatrix hermitize(const CMatrix& m) {
  require_square(m, "hermitize input");
  const Eigen::Index n = m.rows();
  CMatrix r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = cplx(m(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      r(i, j) = v;
      r(j, i) = std::conj(v);
    }
  }
  return r;
}

HermitianDefect hermitian_defect(const CMatrix& m) {
  require_square(m, "matrix");
  HermitianDefect worst;
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double dev = std::abs(m(i, j) - std::conj(m(j, i)));
      if (dev > worst.value) {
        worst = {dev, static_cast<int>(i), static_cast<int>(j)};
      }
    }
  }
  return worst;
}

double min_eigenvalue(const CMatrix& h) {
  const HermitianDefect defect = hermitian_defect(h);
  if (defect.value > 1e-10) {
    throw Error(ErrorCode::kNonHermitian,
                "matrix is not Hermitian: entries (" +
                    std::to_string(defect.row) + "," +
                    std::to_string(defect.col) + ") and (" +
                    std::to_string(defect.col) + "," +
                    std::to_string(defect.row) + ") differ by " +
                    std::to_string(defect.value),
                {{"row", defect.row}, {"col", defect.col},
                 {"deviation", defect.value}});
  }
  const Eigen::Index n = h.rows();
  if (n == 1) return h(0, 0).real();
  if (n == 2) {
    const double a = h(0, 0).real();
    const double b = h(1, 1).real();
    const double c = std::abs(0.5 * (h(0, 1) + std::conj(h(1, 0))));
    return 0.5 * (a + b) - std::hypot(0.5 * (a - b), c);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(h),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  check_same_dims(a, b);
  return a * b - b * a;
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
  check_same_dims(a, b);
  return a * b + b * a;
}

CMatrix dissipator(const CMatrix& m, const CMatrix& rho) {
  check_same_dims(m, rho);
  const CMatrix mdag = m.adjoint();
  return m * rho * mdag - 0.5 * anticommutator(mdag * m, rho);
}

}  // namespace jumplab
