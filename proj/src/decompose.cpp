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

#include "jumplab/decompose.hpp"

#include <cmath>

#include "jumplab/error.hpp"
#include "jumplab/model_io.hpp"

namespace jumplab {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kActiveTol = 1e-12;

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

double norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

SuperoperatorTensors::SuperoperatorTensors(int n)
    : dim(n),
      A(RMatrix::Zero(n, n)),
      B(static_cast<std::size_t>(n) * n * n),
      C(static_cast<std::size_t>(n) * n * n),
      d(static_cast<std::size_t>(n) * n) {}

SuperoperatorTensors decompose(const ValidatedModel& vm) {
  const LindbladModel& m = vm.model();
  const int n = vm.dim();
  SuperoperatorTensors t(n);

  for (const CMatrix& na : m.Na) {
    const CMatrix ndn = na.adjoint() * na;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        t.A(i, j) += std::norm(na(j, i)) - delta(i, j) * ndn(j, j).real();
      }
    }
  }

  // -i[H1, rho] split into its probability/phase blocks.
  const CMatrix& h = m.H1;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      for (int i = 0; i < n; ++i) {
        t.b(k, l, i) = -kI * h(i, k) * delta(l, i) + kI * h(l, i) * delta(k, i);
        t.c(i, k, l) = -kI * h(k, l) * (delta(i, l) - delta(i, k));
      }
    }
  }

  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      cplx dkl = kI * (m.H2diag[k] - m.H2diag[l]);
      for (const auto& nb : m.Nbdiag) {
        dkl += 0.5 * (std::norm(nb[k]) + std::norm(nb[l]) -
                      2.0 * nb[k] * std::conj(nb[l]));
      }
      t.damping(k, l) = dkl;
    }
  }
  return t;
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kFrozen: return "frozen";
    case Mechanism::kDissipative: return "dissipative";
    case Mechanism::kHamiltonian: return "hamiltonian";
    case Mechanism::kMixed: return "mixed";
  }
  return "unknown";
}

const ChannelReport& ScalingReport::channel(int from, int to) const {
  for (const ChannelReport& c : channels) {
    if (c.from == from && c.to == to) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "no such channel",
              {{"from", from}, {"to", to}});
}

ScalingReport validate_scaling(const ValidatedModel& vm) {
  const SuperoperatorTensors t = decompose(vm);
  const LindbladModel& m = vm.model();
  const int n = vm.dim();

  ScalingReport report;
  report.dim = n;
  report.norm_A = t.A.norm();
  report.norm_B = norm(t.B);
  report.norm_C = norm(t.C);
  report.norm_d = norm(t.d);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ChannelReport ch;
      ch.from = i;
      ch.to = j;
      ch.dissipative = t.A(i, j);
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          ch.hamiltonian += std::abs(t.c(i, k, l) * t.b(k, l, j));
        }
      }
      const bool diss = ch.dissipative > kActiveTol;
      const bool ham = ch.hamiltonian > kActiveTol;
      ch.mechanism = diss && ham ? Mechanism::kMixed
                     : diss      ? Mechanism::kDissipative
                     : ham       ? Mechanism::kHamiltonian
                                 : Mechanism::kFrozen;
      if (ch.mechanism != Mechanism::kFrozen) report.zeno_frozen = false;
      report.channels.push_back(ch);
    }
  }

  for (std::size_t a = 0; a < m.Na.size(); ++a) {
    const CMatrix& na = m.Na[a];
    double off = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (r != c) off += std::norm(na(r, c));
      }
    }
    if (off == 0.0) {
      report.warnings.push_back("Na[" + std::to_string(a) +
                                "] has no off-diagonal part; it only adds "
                                "order-1 dephasing that vanishes in the limit");
    }
  }
  for (int k = 0; k < n; ++k) {
    if (m.H1(k, k) != cplx(0.0, 0.0)) {
      report.warnings.push_back(
          "H1 has a diagonal part; it enters the phases at order gamma and "
          "does not affect the limiting rates");
      break;
    }
  }
  return report;
}

nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json j;
  j["dim"] = r.dim;
  j["zeno_frozen"] = r.zeno_frozen;
  j["tensor_norms"] = {{"A", r.norm_A}, {"B", r.norm_B}, {"C", r.norm_C}, {"d", r.norm_d}};
  j["channels"] = nlohmann::json::array();
  for (const ChannelReport& c : r.channels) {
    j["channels"].push_back({{"from", c.from},
                             {"to", c.to},
                             {"mechanism", std::string(to_string(c.mechanism))},
                             {"dissipative", c.dissipative},
                             {"hamiltonian", c.hamiltonian},
                             {"zeno_frozen", c.mechanism == Mechanism::kFrozen}});
  }
  j["warnings"] = r.warnings;
  return j;
}

nlohmann::json to_json(const SuperoperatorTensors& t) {
  using nlohmann::json;
  json j;
  j["dim"] = t.dim;
  json a = json::array();
  for (int i = 0; i < t.dim; ++i) {
    json row = json::array();
    for (int k = 0; k < t.dim; ++k) row.push_back(t.A(i, k));
    a.push_back(std::move(row));
  }
  j["A"] = std::move(a);
  json b = json::array();
  json c = json::array();
  json d = json::array();
  for (int k = 0; k < t.dim; ++k) {
    for (int l = 0; l < t.dim; ++l) {
      if (k == l) continue;
      d.push_back({{"k", k}, {"l", l}, {"value", complex_to_json(t.damping(k, l))}});
      for (int i = 0; i < t.dim; ++i) {
        if (t.b(k, l, i) != cplx(0.0, 0.0)) {
          b.push_back({{"k", k}, {"l", l}, {"i", i}, {"value", complex_to_json(t.b(k, l, i))}});
        }
        if (t.c(i, k, l) != cplx(0.0, 0.0)) {
          c.push_back({{"i", i}, {"k", k}, {"l", l}, {"value", complex_to_json(t.c(i, k, l))}});
        }
      }
    }
  }
  j["B"] = std::move(b);
  j["C"] = std::move(c);
  j["d"] = std::move(d);
  return j;
}

}  // namespace jumplab
