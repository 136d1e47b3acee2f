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

// Block decomposition of the system generator in the pointer basis.
//
// With Q_i = rho_ii and U_kl = rho_kl (k != l), the generator splits into
//
//   dQ_j/dt  = sum_i A^i_j Q_i + gamma sum_{k!=l} B^{kl}_j U_kl
//   dU_kl/dt = gamma sum_i C^i_{kl} Q_i - gamma^2 d_kl U_kl + (subleading)
//
// Only the leading order of each block is kept. Diagonal entries of the
// order-1 collapse operators and of H1 feed phase terms of lower order and
// are dropped here, although the simulators still integrate them.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "jumplab/model.hpp"

namespace jumplab {

struct SuperoperatorTensors {
  int dim = 0;
  RMatrix A;            // A(i, j): rate contribution i -> j
  std::vector<cplx> B;  // B^{kl}_i at (k * dim + l) * dim + i
  std::vector<cplx> C;  // C^i_{kl} at (i * dim + k) * dim + l
  std::vector<cplx> d;  // d_kl at k * dim + l, zero on the diagonal

  explicit SuperoperatorTensors(int n = 0);

  cplx b(int k, int l, int i) const { return B[(k * dim + l) * dim + i]; }
  cplx& b(int k, int l, int i) { return B[(k * dim + l) * dim + i]; }
  cplx c(int i, int k, int l) const { return C[(i * dim + k) * dim + l]; }
  cplx& c(int i, int k, int l) { return C[(i * dim + k) * dim + l]; }
  cplx damping(int k, int l) const { return d[k * dim + l]; }
  cplx& damping(int k, int l) { return d[k * dim + l]; }
};

SuperoperatorTensors decompose(const ValidatedModel& model);

enum class Mechanism { kFrozen, kDissipative, kHamiltonian, kMixed };
std::string_view to_string(Mechanism m);

struct ChannelReport {
  int from = 0;
  int to = 0;
  Mechanism mechanism = Mechanism::kFrozen;
  double dissipative = 0.0;  // A^from_to
  double hamiltonian = 0.0;  // sum_{k<l} |C^from_kl B^kl_to|
};

struct ScalingReport {
  int dim = 0;
  std::vector<ChannelReport> channels;  // all ordered pairs from != to
  double norm_A = 0.0;
  double norm_B = 0.0;
  double norm_C = 0.0;
  double norm_d = 0.0;
  bool zeno_frozen = true;
  std::vector<std::string> warnings;

  const ChannelReport& channel(int from, int to) const;
};

/// Checks the model against the admissible gamma scaling and attributes
/// each i -> j channel to its driving mechanism.
ScalingReport validate_scaling(const ValidatedModel& model);

nlohmann::json to_json(const ScalingReport& report);
nlohmann::json to_json(const SuperoperatorTensors& tensors);

}  // namespace jumplab
