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

// Limiting jump process on the pointer states.
//
// Rates follow the convention m(i, j) = rate of i -> j, so the mean
// occupations obey dQbar_j/dt = sum_i Qbar_i m(i, j) and rows sum to zero.

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "jumplab/decompose.hpp"
#include "jumplab/model.hpp"

namespace jumplab {

inline constexpr double kNegativeRateTol = 1e-9;

class RateGenerator {
 public:
  RateGenerator() = default;
  /// Takes the off-diagonal rates of `rates` (its diagonal is ignored),
  /// clamps negatives above -kNegativeRateTol to zero and fills the
  /// diagonal with minus the row sums. kNegativeRate below that.
  explicit RateGenerator(const RMatrix& rates);

  static RateGenerator zero(int dim);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const RMatrix& matrix() const noexcept { return m_; }
  double operator()(int from, int to) const { return m_(from, to); }
  /// -m(i, i)
  double exit_rate(int i) const { return -m_(i, i); }

 private:
  RMatrix m_;
};

struct StatePoint {
  double time = 0.0;
  int state = 0;
};

/// Piecewise-constant path on the pointer states. points.front().time is
/// the first time a state was assigned (0 for sampled Markov paths).
struct StatePath {
  int dim = 0;
  std::vector<StatePoint> points;
  double horizon = 0.0;
  std::vector<double> transit_times;  // one per transition, detected paths only

  double start_time() const { return points.empty() ? horizon : points.front().time; }
  int transitions() const { return points.empty() ? 0 : static_cast<int>(points.size()) - 1; }
  /// Total time spent in each state between start_time() and horizon.
  std::vector<double> dwell_totals() const;
};

/// Delta_kl = 1/2 (|nu_k|^2 + |nu_l|^2 - 2 nu_k conj(nu_l)) + d_kl
cplx delta(int k, int l, const SuperoperatorTensors& tensors,
           const MeasurementSetup& setup);

/// m(i, j) = A^i_j + 2 Re sum_{k<l} C^i_kl B^kl_j / Delta_kl for i != j.
RateGenerator jump_rates(const SuperoperatorTensors& tensors,
                         const MeasurementSetup& setup);

/// pi with pi M = 0 and sum(pi) = 1; kReducible if not unique.
std::vector<double> stationary(const RateGenerator& gen);

/// Exact (Gillespie) sample of the Markov process.
StatePath markov_sample(const RateGenerator& gen, std::span<const double> q0,
                        double horizon, std::uint64_t seed);

nlohmann::json to_json(const RateGenerator& gen);

}  // namespace jumplab
