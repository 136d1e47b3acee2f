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

#include "jumplab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "jumplab/error.hpp"
#include "jumplab/model_io.hpp"
#include "jumplab/rates.hpp"

namespace jumplab::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument, "config field '" + field + "': " + why,
              {{"field", field}});
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "must be finite");
  return v;
}

std::optional<double> number_or_auto(const json& j, const std::string& field) {
  if (j.is_string()) {
    if (j.get<std::string>() != "auto") bad(field, "expected a number or \"auto\"");
    return std::nullopt;
  }
  return number(j, field);
}

std::int64_t integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<std::int64_t>();
}

bool boolean(const json& j, const std::string& field) {
  if (!j.is_boolean()) bad(field, "expected true or false");
  return j.get<bool>();
}

RunSettings parse_run(const json& j) {
  RunSettings run;
  if (j.is_null()) return run;
  if (!j.is_object()) bad("run", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = "run." + key;
    if (key == "dt") {
      run.dt = number_or_auto(value, field);
      if (run.dt && !(*run.dt > 0.0)) bad(field, "must be positive");
    } else if (key == "horizon") {
      run.horizon = number(value, field);
      if (!(run.horizon > 0.0)) bad(field, "must be positive");
    } else if (key == "n_trajectories") {
      const auto n = integer(value, field);
      if (n < 1 || n > std::numeric_limits<int>::max()) bad(field, "must be >= 1");
      run.n_trajectories = static_cast<int>(n);
    } else if (key == "master_seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        bad(field, "expected a non-negative integer");
      }
      run.master_seed = value.get<std::uint64_t>();
    } else if (key == "decimation") {
      const auto n = integer(value, field);
      if (n < 1 || n > std::numeric_limits<int>::max()) bad(field, "must be >= 1");
      run.decimation = static_cast<int>(n);
    } else if (key == "epsilon") {
      run.epsilon = number(value, field);
      if (!(run.epsilon > 0.0 && run.epsilon < 0.5)) bad(field, "must lie in (0, 0.5)");
    } else if (key == "burn_in") {
      run.burn_in = number_or_auto(value, field);
      if (run.burn_in && !(*run.burn_in > 0.0)) bad(field, "must be positive");
    } else if (key == "rho0") {
      run.rho0 = matrix_from_json(value);
    } else if (key == "initial_q") {
      if (!value.is_array()) bad(field, "expected an array of probabilities");
      std::vector<double> q;
      for (const auto& v : value) q.push_back(number(v, field));
      run.rho0 = DensityMatrix::from_probabilities(q).matrix();
    } else if (key == "collapse_window") {
      run.collapse_window = number(value, field);
      if (!(*run.collapse_window > 0.0)) bad(field, "must be positive");
    } else if (key == "scheme") {
      if (!value.is_string()) bad(field, "expected a string");
      run.scheme = scheme_from_string(value.get<std::string>());
    } else {
      bad(field, "unknown field");
    }
  }
  if (j.contains("rho0") && j.contains("initial_q")) {
    bad("run.rho0", "give either rho0 or initial_q, not both");
  }
  return run;
}

OutputSettings parse_outputs(const json& j, const std::filesystem::path& base) {
  OutputSettings out;
  if (j.is_null()) return out;
  if (!j.is_object()) bad("outputs", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = "outputs." + key;
    if (key == "dir") {
      if (!value.is_string()) bad(field, "expected a path");
      std::filesystem::path p = value.get<std::string>();
      out.dir = p.is_relative() && !base.empty() ? base / p : p;
    } else if (key == "save_trajectories") {
      out.save_trajectories = boolean(value, field);
    } else if (key == "save_qy") {
      out.save_qy = boolean(value, field);
    } else {
      bad(field, "unknown field");
    }
  }
  return out;
}

ZenoSettings parse_zeno(const json& j) {
  ZenoSettings z;
  if (j.is_null()) return z;
  if (!j.is_object()) bad("zeno", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = "zeno." + key;
    if (key == "gammas") {
      if (!value.is_array()) bad(field, "expected an array");
      for (const auto& g : value) z.gammas.push_back(number(g, field));
    } else if (key == "fixed_horizon") {
      z.fixed_horizon = number_or_auto(value, field);
    } else {
      bad(field, "unknown field");
    }
  }
  return z;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) bad("<root>", "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "model" && key != "run" && key != "outputs" && key != "zeno" &&
        key != "schema_version" && key != "description") {
      bad(key, "unknown field");
    }
  }
  if (!doc.contains("model")) bad("model", "missing");

  ExperimentConfig cfg;
  cfg.source = doc;
  const json& m = doc["model"];
  if (m.is_string()) {
    std::filesystem::path p = m.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.model = load_model(p);
    cfg.source["model"] = model_to_json(cfg.model);
  } else {
    cfg.model = model_from_json(m);
  }
  try {
    cfg.run = parse_run(doc.value("run", json()));
    cfg.outputs = parse_outputs(doc.value("outputs", json()), base_dir);
    cfg.zeno = parse_zeno(doc.value("zeno", json()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  if (cfg.run.rho0 && cfg.run.rho0->rows() != cfg.model.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "run.rho0 does not match the model dimension",
                {{"field", "run.rho0"}});
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open config " + path.string(), {{"path", path.string()}});
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "config " + path.string() + " is not valid JSON: " + e.what(),
                {{"path", path.string()}});
  }
  return config_from_json(doc, path.parent_path());
}

double resolve_dt(const RunSettings& run, double gamma) {
  if (run.dt) return *run.dt;
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt \"auto\" needs gamma > 0; set run.dt",
                {{"field", "run.dt"}});
  }
  return kAutoDtFactor / (gamma * gamma);
}

double resolve_burn_in(const RunSettings& run, const SuperoperatorTensors& tensors,
                       const MeasurementSetup& setup) {
  if (run.burn_in) return *run.burn_in;
  if (!(setup.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "burn_in \"auto\" needs gamma > 0",
                {{"field", "run.burn_in"}});
  }
  double min_re = std::numeric_limits<double>::infinity();
  for (int k = 0; k < tensors.dim; ++k) {
    for (int l = k + 1; l < tensors.dim; ++l) {
      min_re = std::min(min_re, delta(k, l, tensors, setup).real());
    }
  }
  if (!(min_re > 1e-12) || !std::isfinite(min_re)) {
    throw Error(ErrorCode::kVanishingDelta, "burn_in \"auto\" needs min Re Delta > 0",
                {{"field", "run.burn_in"}});
  }
  return kAutoBurnInFactor / (setup.gamma * setup.gamma * min_re);
}

DensityMatrix initial_state(const RunSettings& run, int dim) {
  if (run.rho0) return DensityMatrix(*run.rho0);
  return DensityMatrix::maximally_mixed(dim);
}

}  // namespace jumplab::cli
