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

#include "jumplab/model_io.hpp"

#include <fstream>
#include <string>

#include "jumplab/error.hpp"

namespace jumplab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "malformed model: " + what);
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

bool is_complex_literal(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

// A list of complex numbers, or a square matrix that must be diagonal.
std::vector<cplx> diagonal_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) bad(name + " must be an array");
  const bool as_matrix = !j.empty() && j[0].is_array() && !is_complex_literal(j[0]);
  std::vector<cplx> out;
  if (!as_matrix) {
    for (const json& v : j) {
      out.push_back(v.is_number() ? cplx(v.get<double>(), 0.0) : complex_from_json(v));
    }
    return out;
  }
  const CMatrix m = matrix_from_json(j);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != c && m(r, c) != cplx(0.0, 0.0)) {
        throw Error(ErrorCode::kNonDiagonalFastTerm,
                    name + " enters at order gamma^2 and must be diagonal; entry (" +
                        std::to_string(r) + "," + std::to_string(c) + ") is nonzero",
                    {{"field", name}, {"row", r}, {"col", c}});
      }
    }
    out.push_back(m(r, r));
  }
  return out;
}

}  // namespace

cplx complex_from_json(const json& j) {
  if (!is_complex_literal(j)) bad("expected a complex number [re, im], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty matrix");
  const auto n = static_cast<int>(j.size());
  if (n > kMaxDim) bad("matrix larger than " + std::to_string(kMaxDim));
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) bad("matrix is not square");
    for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

LindbladModel model_from_json(const json& j) {
  LindbladModel model;
  try {
    model.dim = field(j, "dim").get<int>();
    model.setup.dim = model.dim;
    model.setup.gamma = field(j, "gamma").get<double>();
    model.setup.eta = j.value("eta", 1.0);
    for (const json& v : field(j, "nu")) model.setup.nu.push_back(complex_from_json(v));

    if (j.contains("H1")) {
      model.H1 = matrix_from_json(j.at("H1"));
    } else {
      model.H1 = CMatrix::Zero(model.dim, model.dim);
    }
    if (j.contains("H2diag")) {
      for (const cplx& h : diagonal_from_json(j.at("H2diag"), "H2diag")) {
        if (h.imag() != 0.0) bad("H2diag must be real");
        model.H2diag.push_back(h.real());
      }
    } else {
      model.H2diag.assign(model.dim, 0.0);
    }
    if (j.contains("Na")) {
      for (const json& m : j.at("Na")) model.Na.push_back(matrix_from_json(m));
    }
    if (j.contains("Nbdiag")) {
      const json& list = j.at("Nbdiag");
      for (std::size_t b = 0; b < list.size(); ++b) {
        model.Nbdiag.push_back(
            diagonal_from_json(list[b], "Nbdiag[" + std::to_string(b) + "]"));
      }
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return model;
}

json model_to_json(const LindbladModel& model) {
  json j;
  j["dim"] = model.dim;
  j["gamma"] = model.setup.gamma;
  j["eta"] = model.setup.eta;
  j["nu"] = json::array();
  for (const cplx& v : model.setup.nu) j["nu"].push_back(complex_to_json(v));
  j["H1"] = matrix_to_json(model.H1);
  j["H2diag"] = model.H2diag;
  j["Na"] = json::array();
  for (const CMatrix& m : model.Na) j["Na"].push_back(matrix_to_json(m));
  j["Nbdiag"] = json::array();
  for (const auto& d : model.Nbdiag) {
    json row = json::array();
    for (const cplx& v : d) row.push_back(complex_to_json(v));
    j["Nbdiag"].push_back(std::move(row));
  }
  return j;
}

LindbladModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open model file " + path.string(),
                {{"path", path.string()}});
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace jumplab
