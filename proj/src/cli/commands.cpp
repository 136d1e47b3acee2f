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

#include "jumplab/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "jumplab/decompose.hpp"
#include "jumplab/ensemble.hpp"
#include "jumplab/rates.hpp"
#include "jumplab/rng.hpp"

namespace jumplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorCode code) {
  switch (category(code)) {
    case ErrorCategory::kIo:
      return 1;
    case ErrorCategory::kNumerical:
      return 3;
    case ErrorCategory::kValidation:
      break;
  }
  return 2;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message(),
                {{"path", dir.string()}});
  }
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string(), {{"path", path.string()}});
  writer(out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string(), {{"path", path.string()}});
}

void write_json(const fs::path& path, const json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

json error_object(const Error& e) {
  return {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

TrajectoryFailure failure_from(std::size_t index, std::uint64_t seed, std::exception_ptr ep) {
  TrajectoryFailure f{index, seed, json::object()};
  try {
    std::rethrow_exception(ep);
  } catch (const Error& e) {
    f.error = e.to_json();
  } catch (const std::exception& e) {
    f.error = {{"error", "internal"}, {"message", e.what()}, {"details", {{"seed", seed}}}};
  }
  return f;
}

json failure_json(const TrajectoryFailure& f) {
  return {{"index", f.index}, {"seed", f.seed}, {"error", f.error}};
}

void check_guard(double dt, double gamma) {
  if (dt * gamma * gamma > kStabilityLimit) {
    throw Error(ErrorCode::kStabilityGuard,
                "dt * gamma^2 = " + std::to_string(dt * gamma * gamma) + " exceeds " +
                    std::to_string(kStabilityLimit),
                {{"dt", dt}, {"gamma", gamma}, {"limit", kStabilityLimit}});
  }
}

// Mean exit rate of the stationary process, or of the uniform mixture when
// the generator is reducible.
double mean_exit_rate(const RateGenerator& gen) {
  std::vector<double> pi;
  try {
    pi = stationary(gen);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kReducible) throw;
    pi.assign(gen.dim(), 1.0 / gen.dim());
  }
  double r = 0.0;
  for (int i = 0; i < gen.dim(); ++i) r += pi[i] * gen.exit_rate(i);
  return r;
}

}  // namespace

// --- analytic ---------------------------------------------------------------

json analytic_block(const ValidatedModel& model) {
  const SuperoperatorTensors tensors = decompose(model);
  const ScalingReport report = validate_scaling(model);
  const RateGenerator gen = jump_rates(tensors, model.setup());

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dim"] = model.dim();
  doc["generator"] = to_json(gen)["matrix"];
  try {
    doc["stationary"] = stationary(gen);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kReducible) throw;
    doc["stationary"] = nullptr;
    doc["stationary_note"] = e.what();
  }
  doc["mechanisms"] = to_json(report);
  json deltas = json::array();
  for (int k = 0; k < model.dim(); ++k) {
    for (int l = k + 1; l < model.dim(); ++l) {
      const cplx dkl = delta(k, l, tensors, model.setup());
      deltas.push_back({{"k", k}, {"l", l}, {"delta", {dkl.real(), dkl.imag()}}});
    }
  }
  doc["delta"] = std::move(deltas);
  return doc;
}

// --- ensembles --------------------------------------------------------------

std::vector<Trajectory> SmeEnsemble::completed() const {
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    if (t) out.push_back(*t);
  }
  return out;
}

JumpCounts SmeEnsemble::counts(int dim) const {
  JumpCounts c(dim);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (trajectories[i] && paths[i]) c.add(*paths[i]);
  }
  return c;
}

std::int64_t SmeEnsemble::no_collapse() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (trajectories[i] && !paths[i]) ++n;
  }
  return n;
}

SmeEnsemble run_sme_ensemble(const ValidatedModel& model, const RunSettings& run,
                             int workers) {
  const int dim = model.dim();
  SmeEnsemble ens;
  ens.dt = resolve_dt(run, model.gamma());
  check_guard(ens.dt, model.gamma());
  ens.horizon = std::round(run.horizon / ens.dt) * ens.dt;
  const DensityMatrix rho0 = initial_state(run, dim);
  JumpDetector(dim, run.epsilon);  // validates epsilon before any work

  const std::size_t n = static_cast<std::size_t>(run.n_trajectories);
  ens.seeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) ens.seeds[i] = stream_seed(run.master_seed, i);
  ens.trajectories.resize(n);
  ens.paths.resize(n);

  const auto errors = parallel_for(
      n,
      [&](std::size_t i) {
        JumpDetector det(dim, run.epsilon);
        SmeOptions opts;
        opts.scheme = run.scheme;
        opts.observer = [&det](double t, std::span<const double> q) { det.feed(t, q); };
        Trajectory traj =
            simulate_sme(model, rho0, ens.dt, run.horizon, ens.seeds[i], run.decimation, opts);
        ens.paths[i] = det.finish(ens.horizon);
        ens.trajectories[i] = std::move(traj);
      },
      workers);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      ens.paths[i].reset();
      ens.failures.push_back(failure_from(i, ens.seeds[i], errors[i]));
    }
  }
  return ens;
}

std::vector<QYTrajectory> QyEnsemble::completed() const {
  std::vector<QYTrajectory> out;
  for (const auto& t : trajectories) {
    if (t) out.push_back(*t);
  }
  return out;
}

QyEnsemble run_qy_ensemble(const ValidatedModel& model, const RunSettings& run, int workers) {
  const int dim = model.dim();
  const SuperoperatorTensors tensors = decompose(model);
  const double dt = resolve_dt(run, model.gamma());
  check_guard(dt, model.gamma());
  const DensityMatrix rho0 = initial_state(run, dim);
  const std::vector<double> q0 = rho0.populations();
  QyOptions base;
  base.decimation = run.decimation;
  for (int k = 0; k < dim; ++k) {
    for (int l = k + 1; l < dim; ++l) base.u0.push_back(rho0.matrix()(k, l));
  }

  const std::size_t n = static_cast<std::size_t>(run.n_trajectories);
  QyEnsemble ens;
  ens.trajectories.resize(n);
  const auto errors = parallel_for(
      n,
      [&](std::size_t i) {
        ens.trajectories[i] = simulate_qy(tensors, model.setup(), q0, dt, run.horizon,
                                          stream_seed(run.master_seed, i), base);
      },
      workers);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      ens.failures.push_back(failure_from(i, stream_seed(run.master_seed, i), errors[i]));
    }
  }
  return ens;
}

// --- simulate ---------------------------------------------------------------

SimulationReport simulate_report(const ExperimentConfig& config, int workers) {
  const ValidatedModel model = validate_model(config.model);
  const int dim = model.dim();
  const SuperoperatorTensors tensors = decompose(model);
  const RateGenerator gen = jump_rates(tensors, model.setup());

  SimulationReport rep;
  rep.analytic = analytic_block(model);
  rep.ensemble = run_sme_ensemble(model, config.run, workers);
  const SmeEnsemble& ens = rep.ensemble;

  json& s = rep.summary;
  s["schema_version"] = kSchemaVersion;
  s["analytic"] = rep.analytic;
  s["run"] = {{"gamma", model.gamma()},
              {"eta", model.eta()},
              {"dt", ens.dt},
              {"horizon", ens.horizon},
              {"n_trajectories", config.run.n_trajectories},
              {"master_seed", config.run.master_seed},
              {"decimation", config.run.decimation},
              {"epsilon", config.run.epsilon},
              {"scheme", std::string(to_string(config.run.scheme))},
              {"initial_populations", initial_state(config.run, dim).populations()}};

  const JumpCounts counts = ens.counts(dim);
  try {
    s["jump_stats"] = to_json(estimate_generator(counts), gen);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyEnsemble) throw;
    s["jump_stats"] = error_object(e);
  }
  const double total_dwell = std::accumulate(counts.dwell.begin(), counts.dwell.end(), 0.0);
  json occupation = json::array();
  for (double d : counts.dwell) occupation.push_back(total_dwell > 0.0 ? d / total_dwell : 0.0);
  s["occupation"] = std::move(occupation);
  s["no_collapse_trajectories"] = ens.no_collapse();

  std::vector<std::optional<StatePath>> done;
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    if (ens.trajectories[i]) done.push_back(ens.paths[i]);
  }
  const double window = config.run.collapse_window.value_or(ens.horizon);
  if (done.empty()) {
    s["collapse"] = {{"error", "empty_ensemble"}, {"message", "no completed trajectories"}};
  } else {
    try {
      json c = to_json(collapse_frequencies(done, window));
      c["window"] = window;
      s["collapse"] = std::move(c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCollapse) throw;
      s["collapse"] = error_object(e);
      s["collapse"]["window"] = window;
    }
  }

  const std::vector<Trajectory> completed = ens.completed();
  if (!completed.empty()) rep.mean_q = ensemble_mean_q(completed);

  if (config.outputs.save_qy) {
    rep.qy = run_qy_ensemble(model, config.run, workers);
    const double burn_in = resolve_burn_in(config.run, tensors, model.setup());
    const std::vector<QYTrajectory> qy = rep.qy->completed();
    json phases = json::array();
    for (int state = 0; state < dim; ++state) {
      json entry = {{"state", state}, {"burn_in", burn_in}};
      json predicted = json::array();
      for (int k = 0; k < dim; ++k) {
        for (int l = k + 1; l < dim; ++l) {
          const cplx v = tensors.c(state, k, l) / delta(k, l, tensors, model.setup());
          predicted.push_back({v.real(), v.imag()});
        }
      }
      entry["predicted"] = std::move(predicted);
      try {
        entry["estimate"] = to_json(conditional_phase_mean(qy, state, config.run.epsilon, burn_in));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInsufficientSamples) throw;
        entry["estimate"] = error_object(e);
      }
      phases.push_back(std::move(entry));
    }
    s["phase_means"] = std::move(phases);
  }

  json failures = json::array();
  std::int64_t positivity = 0;
  for (const auto& f : ens.failures) {
    failures.push_back(failure_json(f));
    if (f.error.value("error", "") == "positivity_breach") ++positivity;
  }
  if (rep.qy) {
    for (const auto& f : rep.qy->failures) {
      json j = failure_json(f);
      j["integrator"] = "qy";
      failures.push_back(std::move(j));
      if (f.error.value("error", "") == "positivity_breach") ++positivity;
    }
  }
  double max_defect = 0.0;
  for (const auto& t : completed) max_defect = std::max(max_defect, t.max_trace_defect);
  s["diagnostics"] = {{"failed_trajectories", failures},
                      {"positivity_breaches", positivity},
                      {"max_pre_normalization_trace_defect", max_defect},
                      {"transitions", counts.total_transitions()}};
  rep.exit_code = failures.empty() ? 0 : 3;
  return rep;
}

// --- zeno -------------------------------------------------------------------

std::vector<ZenoRow> zeno_sweep(const ExperimentConfig& config, std::span<const double> gammas,
                                int workers) {
  if (gammas.size() < 2) {
    throw Error(ErrorCode::kUsage, "the zeno sweep needs at least two gamma values",
                {{"gammas", std::vector<double>(gammas.begin(), gammas.end())}});
  }
  const double base_gamma = config.model.setup.gamma;
  if (!(base_gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "the zeno sweep needs the base model at gamma > 0 to fix the Hamiltonian",
                {{"gamma", base_gamma}});
  }
  std::vector<ZenoRow> rows;
  for (double gamma : gammas) {
    if (!(gamma > 0.0)) {
      throw Error(ErrorCode::kUsage, "gamma values must be positive", {{"gamma", gamma}});
    }
    ZenoRow row;
    row.gamma = gamma;

    LindbladModel fixed = config.model;
    fixed.setup.gamma = gamma;
    fixed.H1 = config.model.H1 * (base_gamma / gamma);
    LindbladModel rescaled = config.model;
    rescaled.setup.gamma = gamma;
    const ValidatedModel vf = validate_model(fixed);
    const ValidatedModel vr = validate_model(rescaled);
    const int dim = vf.dim();

    RunSettings run = config.run;
    run.dt = resolve_dt(config.run, gamma);
    row.dt = *run.dt;

    const double fixed_exit = mean_exit_rate(jump_rates(decompose(vf), vf.setup()));
    row.fixed_predicted_dwell =
        fixed_exit > 0.0 ? 1.0 / fixed_exit : std::numeric_limits<double>::infinity();
    if (config.zeno.fixed_horizon) {
      run.horizon = *config.zeno.fixed_horizon;
    } else {
      if (!std::isfinite(row.fixed_predicted_dwell)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "fixed_horizon \"auto\" needs a nonzero predicted rate; set zeno.fixed_horizon");
      }
      run.horizon = kAutoHorizonDwells * row.fixed_predicted_dwell;
    }
    const SmeEnsemble ef = run_sme_ensemble(vf, run, workers);
    row.fixed_horizon = ef.horizon;
    const JumpCounts cf = ef.counts(dim);
    row.fixed_transitions = cf.total_transitions();
    const double tf = std::accumulate(cf.dwell.begin(), cf.dwell.end(), 0.0);
    if (row.fixed_transitions > 0) {
      row.fixed_mean_dwell = tf / static_cast<double>(row.fixed_transitions);
      row.fixed_mean_dwell_se =
          row.fixed_mean_dwell / std::sqrt(static_cast<double>(row.fixed_transitions));
    } else {
      row.fixed_mean_dwell = std::numeric_limits<double>::infinity();
      row.fixed_mean_dwell_se = std::numeric_limits<double>::infinity();
    }

    RunSettings rrun = config.run;
    rrun.dt = row.dt;
    row.rescaled_predicted_rate = mean_exit_rate(jump_rates(decompose(vr), vr.setup()));
    const SmeEnsemble er = run_sme_ensemble(vr, rrun, workers);
    const JumpCounts cr = er.counts(dim);
    row.rescaled_transitions = cr.total_transitions();
    const double tr = std::accumulate(cr.dwell.begin(), cr.dwell.end(), 0.0);
    if (tr > 0.0) {
      row.rescaled_rate = static_cast<double>(row.rescaled_transitions) / tr;
      row.rescaled_rate_se = std::sqrt(static_cast<double>(row.rescaled_transitions)) / tr;
    }
    row.failures = static_cast<std::int64_t>(ef.failures.size() + er.failures.size());
    rows.push_back(row);
  }
  return rows;
}

// --- commands ---------------------------------------------------------------

int cmd_rates(const ExperimentConfig& config, std::ostream& log) {
  const ValidatedModel model = validate_model(config.model);
  const json doc = analytic_block(model);
  make_dir(config.outputs.dir);
  write_json(config.outputs.dir / "rates.json", doc);
  log << "wrote " << (config.outputs.dir / "rates.json").string() << '\n';
  return 0;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& log, std::ostream& err) {
  SimulationReport rep = simulate_report(config);
  const fs::path& dir = config.outputs.dir;
  make_dir(dir);

  json echo = config.source;
  echo["resolved"] = {{"dt", rep.ensemble.dt}, {"horizon", rep.ensemble.horizon}};
  write_json(dir / "config.json", echo);
  write_json(dir / "rates.json", rep.analytic);
  rep.summary["timestamp"] = utc_timestamp();
  write_json(dir / "summary.json", rep.summary);

  if (rep.mean_q) {
    const MeanQ& m = *rep.mean_q;
    write_file(dir / "meanq.csv", [&](std::ostream& out) {
      out << "t";
      for (int k = 0; k < m.dim; ++k) out << ",Q_" << k;
      for (int k = 0; k < m.dim; ++k) out << ",se_Q_" << k;
      out << '\n' << std::setprecision(15);
      for (std::size_t n = 0; n < m.times.size(); ++n) {
        out << m.times[n];
        for (int k = 0; k < m.dim; ++k) out << ',' << m.mean[n * m.dim + k];
        for (int k = 0; k < m.dim; ++k) out << ',' << m.se[n * m.dim + k];
        out << '\n';
      }
    });
  }
  if (config.outputs.save_trajectories || config.outputs.save_qy) {
    const fs::path tdir = dir / "trajectories";
    make_dir(tdir);
    auto name = [](const char* stem, std::size_t i) {
      std::ostringstream s;
      s << stem << '_' << std::setw(5) << std::setfill('0') << i << ".csv";
      return s.str();
    };
    if (config.outputs.save_trajectories) {
      for (std::size_t i = 0; i < rep.ensemble.trajectories.size(); ++i) {
        if (!rep.ensemble.trajectories[i]) continue;
        write_file(tdir / name("traj", i),
                   [&](std::ostream& out) { write_csv(out, *rep.ensemble.trajectories[i]); });
      }
    }
    if (rep.qy) {
      for (std::size_t i = 0; i < rep.qy->trajectories.size(); ++i) {
        if (!rep.qy->trajectories[i]) continue;
        write_file(tdir / name("qy", i),
                   [&](std::ostream& out) { write_csv(out, *rep.qy->trajectories[i]); });
      }
    }
  }

  log << "wrote " << dir.string() << " (" << rep.ensemble.trajectories.size()
      << " trajectories, " << rep.summary["diagnostics"]["transitions"] << " transitions)\n";
  if (rep.exit_code != 0) {
    const json& failures = rep.summary["diagnostics"]["failed_trajectories"];
    json report = failures.front()["error"];
    report["failed_trajectories"] = failures.size();
    err << report.dump() << '\n';
  }
  return rep.exit_code;
}

int cmd_zeno(const ExperimentConfig& config, std::span<const double> gammas,
             std::ostream& log, std::ostream& err) {
  const std::vector<ZenoRow> rows = zeno_sweep(config, gammas);
  make_dir(config.outputs.dir);
  const fs::path path = config.outputs.dir / "sweep.csv";
  std::int64_t failures = 0;
  write_file(path, [&](std::ostream& out) {
    out << "gamma,dt,fixed_horizon,fixed_transitions,fixed_mean_dwell,fixed_mean_dwell_se,"
           "fixed_predicted_dwell,rescaled_transitions,rescaled_rate,rescaled_rate_se,"
           "rescaled_predicted_rate,failures\n"
        << std::setprecision(12);
    for (const ZenoRow& r : rows) {
      out << r.gamma << ',' << r.dt << ',' << r.fixed_horizon << ',' << r.fixed_transitions << ','
          << r.fixed_mean_dwell << ',' << r.fixed_mean_dwell_se << ',' << r.fixed_predicted_dwell
          << ',' << r.rescaled_transitions << ',' << r.rescaled_rate << ',' << r.rescaled_rate_se
          << ',' << r.rescaled_predicted_rate << ',' << r.failures << '\n';
      failures += r.failures;
    }
  });
  log << "wrote " << path.string() << '\n';
  if (failures > 0) {
    err << json{{"error", "trajectory_failures"},
                {"message", std::to_string(failures) + " trajectories aborted"},
                {"details", {{"failed_trajectories", failures}}}}
               .dump()
        << '\n';
    return 3;
  }
  return 0;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jump rates of continuously measured open quantum systems", "jumplab"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::vector<double> gammas;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides outputs.dir)");
  };
  CLI::App* rates = app.add_subcommand("rates", "analytic jump-rate generator");
  CLI::App* simulate = app.add_subcommand("simulate", "trajectory ensemble and jump statistics");
  CLI::App* zeno = app.add_subcommand("zeno", "dwell times and rates across gamma");
  add_common(rates);
  add_common(simulate);
  add_common(zeno);
  zeno->add_option("--gammas", gammas, "comma-separated gamma values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << json{{"error", "usage"}, {"message", e.what()}, {"details", json::object()}}.dump()
        << '\n';
    return 2;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    if (!out_dir.empty()) config.outputs.dir = out_dir;
    if (*rates) return cmd_rates(config, out);
    if (*simulate) return cmd_simulate(config, out, err);
    if (gammas.empty()) gammas = config.zeno.gammas;
    return cmd_zeno(config, gammas, out, err);
  } catch (const Error& e) {
    err << e.to_json().dump() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}, {"details", json::object()}}.dump()
        << '\n';
    return 3;
  }
}

}  // namespace jumplab::cli
