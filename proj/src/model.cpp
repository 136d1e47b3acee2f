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

#include "jumplab/model.hpp"

#include <cmath>
#include <string>

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

[[noreturn]] void mismatch(const std::string& field, Eigen::Index got, int dim) {
  throw Error(ErrorCode::kDimensionMismatch,
              field + " has dimension " + std::to_string(got) +
                  ", model dimension is " + std::to_string(dim),
              {{"field", field}, {"got", got}, {"dim", dim}});
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_matrix(const CMatrix& m, int dim, const std::string& field) {
  if (m.rows() != dim) mismatch(field, m.rows(), dim);
  if (m.cols() != dim) mismatch(field, m.cols(), dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!finite(m.data()[i])) {
      throw Error(ErrorCode::kInvalidArgument, field + " has non-finite entries",
                  {{"field", field}});
    }
  }
}

}  // namespace

std::vector<double> MeasurementSetup::lambda() const {
  std::vector<double> out(nu.size());
  for (std::size_t k = 0; k < nu.size(); ++k) out[k] = 2.0 * nu[k].real();
  return out;
}

ValidatedModel validate_model(LindbladModel model) {
  const int dim = model.dim;
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument,
                "model dimension " + std::to_string(dim) + " outside [1, " +
                    std::to_string(kMaxDim) + "]",
                {{"dim", dim}});
  }
  if (model.setup.dim != dim) mismatch("setup.dim", model.setup.dim, dim);
  if (static_cast<int>(model.setup.nu.size()) != dim) {
    mismatch("nu", static_cast<Eigen::Index>(model.setup.nu.size()), dim);
  }
  for (const cplx& v : model.setup.nu) {
    if (!finite(v)) throw Error(ErrorCode::kInvalidArgument, "nu has non-finite entries");
  }
  const double gamma = model.setup.gamma;
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be finite and >= 0",
                {{"gamma", gamma}});
  }
  const double eta = model.setup.eta;
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must lie in (0, 1]",
                {{"eta", eta}});
  }

  check_matrix(model.H1, dim, "H1");
  const HermitianDefect defect = hermitian_defect(model.H1);
  if (defect.value > kHermitianTol) {
    throw Error(ErrorCode::kNonHermitian,
                "H1 is not Hermitian at (" + std::to_string(defect.row) + "," +
                    std::to_string(defect.col) + ")",
                {{"field", "H1"}, {"row", defect.row}, {"col", defect.col},
                 {"deviation", defect.value}});
  }
  model.H1 = hermitize(model.H1);

  if (static_cast<int>(model.H2diag.size()) != dim) {
    mismatch("H2diag", static_cast<Eigen::Index>(model.H2diag.size()), dim);
  }
  for (double h : model.H2diag) {
    if (!std::isfinite(h)) throw Error(ErrorCode::kInvalidArgument, "H2diag has non-finite entries");
  }
  for (std::size_t a = 0; a < model.Na.size(); ++a) {
    check_matrix(model.Na[a], dim, "Na[" + std::to_string(a) + "]");
  }
  for (std::size_t b = 0; b < model.Nbdiag.size(); ++b) {
    const auto& diag = model.Nbdiag[b];
    const std::string field = "Nbdiag[" + std::to_string(b) + "]";
    if (static_cast<int>(diag.size()) != dim) {
      mismatch(field, static_cast<Eigen::Index>(diag.size()), dim);
    }
    for (const cplx& v : diag) {
      if (!finite(v)) throw Error(ErrorCode::kInvalidArgument, field + " has non-finite entries");
    }
  }

  const std::vector<double> lambda = model.setup.lambda();
  for (int k = 0; k < dim; ++k) {
    for (int l = k + 1; l < dim; ++l) {
      if (std::abs(lambda[k] - lambda[l]) <= 1e-9) {
        throw Error(ErrorCode::kDegenerateSpectrum,
                    "observable eigenvalues lambda_" + std::to_string(k) +
                        " and lambda_" + std::to_string(l) + " coincide",
                    {{"k", k}, {"l", l}, {"lambda", lambda[k]}});
      }
    }
  }
  return ValidatedModel(std::move(model));
}

ValidatedModel::ValidatedModel(LindbladModel model)
    : model_(std::move(model)),
      lambda_(model_.setup.lambda()),
      n_(diagonal(std::span<const cplx>(model_.setup.nu))) {}

// --- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  require_square(rho_, "density matrix");
  const HermitianDefect defect = hermitian_defect(rho_);
  if (defect.value > kHermitianTol) {
    throw Error(ErrorCode::kInvalidState, "density matrix is not Hermitian",
                {{"row", defect.row}, {"col", defect.col},
                 {"deviation", defect.value}});
  }
  const cplx tr = rho_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw Error(ErrorCode::kInvalidState, "density matrix trace is not 1",
                {{"trace_re", tr.real()}, {"trace_im", tr.imag()}});
  }
  const double lmin = min_eigenvalue(rho_);
  if (lmin < -kPositivityTol) {
    throw Error(ErrorCode::kInvalidState, "density matrix is not positive",
                {{"min_eigenvalue", lmin}});
  }
}

DensityMatrix DensityMatrix::trusted(CMatrix rho) {
  return DensityMatrix(std::move(rho), Unchecked{});
}

DensityMatrix DensityMatrix::pointer(int dim, int k) {
  return DensityMatrix(projector(dim, k), Unchecked{});
}

DensityMatrix DensityMatrix::from_probabilities(std::span<const double> q) {
  return DensityMatrix(diagonal(q));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim), Unchecked{});
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> q(dim());
  for (int k = 0; k < dim(); ++k) q[k] = rho_(k, k).real();
  return q;
}

// --- generator --------------------------------------------------------------

CMatrix apply_system_generator(const CMatrix& x, const ValidatedModel& vm) {
  const LindbladModel& m = vm.model();
  const double g = vm.gamma();
  const int dim = vm.dim();
  if (x.rows() != dim || x.cols() != dim) mismatch("state", x.rows(), dim);

  CMatrix h = g * m.H1;
  for (int k = 0; k < dim; ++k) h(k, k) += g * g * m.H2diag[k];
  CMatrix out = cplx(0.0, -1.0) * commutator(h, x);
  for (const CMatrix& na : m.Na) out += dissipator(na, x);
  for (const auto& nb : m.Nbdiag) {
    out += (g * g) * dissipator(diagonal(std::span<const cplx>(nb)), x);
  }
  return out;
}

CMatrix apply_generator(const CMatrix& x, const ValidatedModel& vm) {
  const double g = vm.gamma();
  return apply_system_generator(x, vm) +
         (g * g) * dissipator(vm.measurement_operator(), x);
}

CMatrix drift(const DensityMatrix& rho, const ValidatedModel& model) {
  return apply_generator(rho.matrix(), model);
}

CMatrix innovation(const DensityMatrix& rho, const ValidatedModel& model) {
  const CMatrix& r = rho.matrix();
  const int dim = model.dim();
  if (r.rows() != dim) mismatch("state", r.rows(), dim);
  const auto& nu = model.setup().nu;
  const auto& lambda = model.lambda();
  double expect_o = 0.0;
  for (int k = 0; k < dim; ++k) expect_o += lambda[k] * r(k, k).real();
  CMatrix out(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int l = 0; l < dim; ++l) {
      out(k, l) = (nu[k] + std::conj(nu[l]) - expect_o) * r(k, l);
    }
  }
  return out;
}

double record_increment(const DensityMatrix& rho, const ValidatedModel& model,
                        double dW, double dt) {
  if (!(dt >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be >= 0", {{"dt", dt}});
  }
  const auto& lambda = model.lambda();
  double expect_o = 0.0;
  for (int k = 0; k < model.dim(); ++k) expect_o += lambda[k] * rho.population(k);
  return model.gamma() * expect_o * dt + dW / std::sqrt(model.eta());
}

}  // namespace jumplab
