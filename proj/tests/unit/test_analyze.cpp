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

#include <doctest.h>

#include "jumplab/analyze.hpp"
#include "jumplab/decompose.hpp"
#include "jumplab/error.hpp"
#include "jumplab/presets.hpp"
#include "jumplab/rates.hpp"
#include "jumplab/rng.hpp"

using namespace jumplab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kIo;
}

RateGenerator symmetric(double r) {
  RMatrix m = RMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = r;
  return RateGenerator(m);
}

}  // namespace

TEST_CASE("square wave gives two transitions at the crossing samples") {
  std::vector<double> times, q;
  const double q0_path[] = {1.0, 1.0, 0.6, 0.2, 0.0, 0.0, 0.5, 0.95, 1.0, 1.0};
  for (int n = 0; n < 10; ++n) {
    times.push_back(n);
    q.push_back(q0_path[n]);
    q.push_back(1.0 - q0_path[n]);
  }
  const auto path = detect_jumps(times, q, 2, 0.1);
  REQUIRE(path);
  REQUIRE(path->transitions() == 2);
  CHECK(path->points[1].time == 4.0);
  CHECK(path->points[1].state == 1);
  CHECK(path->points[2].time == 7.0);
  CHECK(path->points[2].state == 0);
  REQUIRE(path->transit_times.size() == 2);
  // from the first unassigned sample to the new assignment
  CHECK(path->transit_times[0] == doctest::Approx(2.0));
}

TEST_CASE("constant populations") {
  const std::vector<double> times{0, 1, 2}, q{1, 0, 1, 0, 1, 0};
  const auto path = detect_jumps(times, q, 2);
  REQUIRE(path);
  CHECK(path->transitions() == 0);
  CHECK(path->points[0].state == 0);

  const std::vector<double> mixed{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  CHECK_FALSE(detect_jumps(times, mixed, 2).has_value());
  CHECK_THROWS_AS(JumpDetector(2, 0.7), Error);
}

TEST_CASE("estimate_generator") {
  StatePath one;
  one.dim = 2;
  one.points = {{0.0, 0}, {2.0, 1}};
  one.horizon = 3.0;
  const JumpStats s = estimate_generator(std::span<const StatePath>(&one, 1));
  CHECK(s.m_hat(0, 1) == doctest::Approx(0.5));
  CHECK(s.m_hat(0, 0) == doctest::Approx(-0.5));
  CHECK(s.m_hat(1, 0) == 0.0);
  CHECK(s.ci_halfwidth(0, 1) == doctest::Approx(1.96 * 1.0 / 2.0));

  StatePath none;
  none.dim = 2;
  none.points = {{0.0, 0}};
  none.horizon = 5.0;
  CHECK(code_of([&] { estimate_generator(std::span<const StatePath>(&none, 1)); }) ==
        ErrorCode::kEmptyEnsemble);

  const RateGenerator truth = symmetric(1.0);
  const std::vector<double> q0{0.5, 0.5};
  std::vector<StatePath> paths;
  for (int k = 0; k < 20; ++k) paths.push_back(markov_sample(truth, q0, 1200.0, stream_seed(5, k)));
  const JumpStats big = estimate_generator(paths);
  CHECK(big.counts.dwell[0] >= 1e4);
  CHECK(big.ci_halfwidth(0, 1) <= 0.06);
  CHECK(big.ci_halfwidth(1, 0) <= 0.06);
  CHECK(big.covers(truth));
}

TEST_CASE("collapse_frequencies") {
  StatePath p;
  p.dim = 2;
  p.points = {{0.0, 0}};
  p.horizon = 1.0;
  const std::vector<StatePath> all0(10, p);
  const CollapseStats s = collapse_frequencies(all0, 1.0);
  CHECK(s.frequencies[0] == 1.0);
  CHECK(s.frequencies[1] == 0.0);

  std::vector<std::optional<StatePath>> with_gap{p, std::nullopt};
  CHECK(code_of([&] { collapse_frequencies(with_gap, 1.0); }) == ErrorCode::kNoCollapse);

  StatePath late = p;
  late.points = {{2.0, 1}};
  late.horizon = 3.0;
  const std::vector<StatePath> slow{late};
  CHECK(code_of([&] { collapse_frequencies(slow, 1.0); }) == ErrorCode::kNoCollapse);
  CHECK(collapse_frequencies(slow, 2.5).frequencies[1] == 1.0);
}

TEST_CASE("ensemble collapse follows the Born rule") {
  const ValidatedModel meas = validate_model(presets::pure_measurement(5.0));
  const std::vector<double> q{0.9, 0.1};
  const DensityMatrix rho0 = DensityMatrix::from_probabilities(q);
  std::vector<std::optional<StatePath>> paths;
  // First assignment is a first passage, so its law is (q0 - eps) / (1 - 2 eps)
  // by optional stopping; a tight threshold keeps that within the Born
  // interval.
  for (int k = 0; k < 2000; ++k) {
    JumpDetector det(2, 0.002);
    SmeOptions opts;
    opts.observer = [&](double t, std::span<const double> qq) { det.feed(t, qq); };
    simulate_sme(meas, rho0, 5e-4, 2.0, stream_seed(77, k), 1000, opts);
    paths.push_back(det.finish(2.0));
  }
  const CollapseStats s = collapse_frequencies(paths, 2.0);
  CHECK(std::abs(s.frequencies[0] - 0.9) <= s.ci99(0.9));
}

TEST_CASE("Rabi transition counts match the Poisson rate") {
  const ValidatedModel rabi = validate_model(presets::rabi(1.0, 10.0));
  const double horizon = 10.0;
  JumpCounts counts(2);
  const int n = 20;
  for (int k = 0; k < n; ++k) {
    JumpDetector det(2, 0.02);
    SmeOptions opts;
    opts.observer = [&](double t, std::span<const double> q) { det.feed(t, q); };
    simulate_sme(rabi, DensityMatrix::pointer(2, 0), 2e-4, horizon, stream_seed(91, k), 1000, opts);
    counts.add(*det.finish(horizon));
  }
  // per direction, averaged over trajectories: u^2 T / 2 each way
  for (auto [from, to] : {std::pair{0, 1}, std::pair{1, 0}}) {
    const double mean = static_cast<double>(counts.count(from, to)) / n;
    const double expect = 0.5 * horizon;
    CHECK(std::abs(mean - expect) <= 3.0 * std::sqrt(horizon));
  }
}

TEST_CASE("conditional_phase_mean") {
  const ValidatedModel thermal = validate_model(presets::thermal(1.0, 0.7, 1.0, 10.0));
  const SuperoperatorTensors t = decompose(thermal);
  const std::vector<double> q0{0.5, 0.5};
  std::vector<QYTrajectory> qy;
  for (int k = 0; k < 5; ++k) {
    qy.push_back(simulate_qy(t, thermal.setup(), q0, 2e-4, 5.0, stream_seed(3, k), {10, {cplx(0.1, 0.2)}, {}}));
  }
  const PhaseMeans m = conditional_phase_mean(qy, 0, 0.1, 0.5);
  CHECK(std::abs(m.mean[0].real()) <= 3.0 * m.se_re[0] + 1e-12);
  CHECK(std::abs(m.mean[0].imag()) <= 3.0 * m.se_im[0] + 1e-12);

  CHECK(code_of([&] { conditional_phase_mean(qy, 0, 0.1, 100.0); }) == ErrorCode::kInsufficientSamples);
}

TEST_CASE("ensemble_mean_q") {
  const ValidatedModel meas = validate_model(presets::pure_measurement(5.0));
  const Trajectory one = simulate_sme(meas, DensityMatrix::maximally_mixed(2), 1e-3, 1.0, 4, 10);
  const std::vector<Trajectory> same(4, one);
  const MeanQ m = ensemble_mean_q(same);
  CHECK(m.mean == one.q);
  for (double s : m.se) CHECK(s == 0.0);

  std::vector<Trajectory> ens;
  for (int k = 0; k < 400; ++k) {
    ens.push_back(simulate_sme(meas, DensityMatrix::maximally_mixed(2), 1e-3, 1.0, stream_seed(8, k), 50));
  }
  const MeanQ avg = ensemble_mean_q(ens);
  for (std::size_t n = 1; n < avg.times.size(); ++n) {
    CHECK(std::abs(avg.mean[n * 2] - 0.5) <= 3.0 * avg.se[n * 2]);
  }

  std::vector<Trajectory> mismatched{one, simulate_sme(meas, DensityMatrix::maximally_mixed(2), 1e-3, 2.0, 4, 10)};
  CHECK_THROWS_AS(ensemble_mean_q(mismatched), Error);
}
