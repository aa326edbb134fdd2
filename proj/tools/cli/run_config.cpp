// Copyright 2026 The qfilter Authors
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

#include "run_config.hpp"

#include <cmath>
#include <fstream>

namespace qfcli {

namespace {

using nlohmann::json;

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

std::uint64_t unsigned_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

Complex complex_entry(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(field, "expected an [re, im] pair");
  return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
}

ComplexMatrix matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty square array of [re, im] pairs");
  const std::size_t n = v.size();
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != n) throw ConfigError(row, "matrix must be square");
    for (std::size_t k = 0; k < n; ++k) m[i].push_back(complex_entry(v[i][k], row + "[" + std::to_string(k) + "]"));
  }
  return m;
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError(field, "expected a non-empty string");
  return v.get<std::string>();
}

json pair(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& z : row) r.push_back(pair(z));
    out.push_back(r);
  }
  return out;
}

}  // namespace

void check_scheme(const std::string& scheme) {
  if (scheme != "hd-pc" && scheme != "hd-hd") {
    throw ConfigError("scheme", "must be \"hd-pc\" or \"hd-hd\", got \"" + scheme + "\"");
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  RunConfig c;

  const json& sys = member(j, "", "system");
  c.s = matrix(member(sys, "system", "S"), "system.S");
  c.l = matrix(member(sys, "system", "L"), "system.L");
  c.h = matrix(member(sys, "system", "H"), "system.H");
  const std::size_t d = c.l.size();
  if (c.s.size() != d) throw ConfigError("system.S", "dimension differs from system.L");
  if (c.h.size() != d) throw ConfigError("system.H", "dimension differs from system.L");
  const json& psi = member(sys, "system", "psi0");
  if (!psi.is_array() || psi.size() != d) throw ConfigError("system.psi0", "expected " + std::to_string(d) + " [re, im] pairs");
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    c.psi0.push_back(complex_entry(psi[i], "system.psi0[" + std::to_string(i) + "]"));
    norm += std::norm(c.psi0.back());
  }
  if (std::abs(norm - 1.0) > 1e-10) throw ConfigError("system.psi0", "must have unit norm");
  if (sys.contains("excited_index")) {
    c.excited_index = unsigned_integer(sys["excited_index"], "system.excited_index");
    if (c.excited_index >= d) throw ConfigError("system.excited_index", "must be below the dimension");
  }

  const json& wp = member(j, "", "wavepacket");
  c.omega = number(member(wp, "wavepacket", "omega"), "wavepacket.omega");
  if (!(c.omega > 0.0)) throw ConfigError("wavepacket.omega", "must be positive");
  c.t0 = number(member(wp, "wavepacket", "t0"), "wavepacket.t0");

  const json& bs = member(j, "", "beamsplitter");
  c.r = number(member(bs, "beamsplitter", "r"), "beamsplitter.r");
  if (c.r < 0.0 || c.r > 1.0) throw ConfigError("beamsplitter.r", "must lie in [0, 1]");
  c.theta = number(member(bs, "beamsplitter", "theta"), "beamsplitter.theta");

  const json& scheme = member(j, "", "scheme");
  if (!scheme.is_string()) throw ConfigError("scheme", "expected a string");
  c.scheme = scheme.get<std::string>();
  check_scheme(c.scheme);

  const json& grid = member(j, "", "grid");
  c.t_start = number(member(grid, "grid", "t_start"), "grid.t_start");
  c.t_end = number(member(grid, "grid", "t_end"), "grid.t_end");
  c.dt = number(member(grid, "grid", "dt"), "grid.dt");
  if (!(c.dt > 0.0)) throw ConfigError("grid.dt", "must be positive");
  if (!(c.t_end > c.t_start)) throw ConfigError("grid.t_end", "must exceed grid.t_start");

  const json& ens = member(j, "", "ensemble");
  c.n_traj = unsigned_integer(member(ens, "ensemble", "n_traj"), "ensemble.n_traj");
  if (c.n_traj == 0) throw ConfigError("ensemble.n_traj", "must be at least 1");
  c.seed = unsigned_integer(member(ens, "ensemble", "seed"), "ensemble.seed");
  if (ens.contains("threads")) c.threads = static_cast<unsigned>(unsigned_integer(ens["threads"], "ensemble.threads"));
  if (ens.contains("hygiene")) {
    if (!ens["hygiene"].is_boolean()) throw ConfigError("ensemble.hygiene", "expected true or false");
    c.hygiene = ens["hygiene"].get<bool>();
  }

  if (j.contains("output")) {
    const json& out = j["output"];
    if (!out.is_object()) throw ConfigError("output", "expected an object");
    const std::pair<const char*, std::string*> paths[] = {{"trajectories", &c.trajectories_csv},
                                                          {"jumps", &c.jumps_csv},
                                                          {"summary", &c.summary_json},
                                                          {"observables_csv", &c.observables_csv}};
    for (const auto& [key, dst] : paths) {
      if (out.contains(key)) *dst = text(out[key], join("output", key));
    }
    if (out.contains("observables")) {
      const json& obs = out["observables"];
      if (!obs.is_object()) throw ConfigError("output.observables", "expected an object of name: matrix");
      for (const auto& [name, m] : obs.items()) {
        const std::string field = "output.observables." + name;
        if (name == "pe") throw ConfigError(field, "the name \"pe\" is reserved");
        ComplexMatrix op = matrix(m, field);
        if (op.size() != d) throw ConfigError(field, "dimension differs from system.L");
        c.observables.emplace(name, std::move(op));
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json psi = json::array();
  for (const auto& z : c.psi0) psi.push_back(pair(z));
  json obs = json::object();
  for (const auto& [name, m] : c.observables) obs[name] = matrix_json(m);
  return {
      {"system",
       {{"S", matrix_json(c.s)},
        {"L", matrix_json(c.l)},
        {"H", matrix_json(c.h)},
        {"psi0", psi},
        {"excited_index", c.excited_index}}},
      {"wavepacket", {{"omega", c.omega}, {"t0", c.t0}}},
      {"beamsplitter", {{"r", c.r}, {"theta", c.theta}}},
      {"scheme", c.scheme},
      {"grid", {{"t_start", c.t_start}, {"t_end", c.t_end}, {"dt", c.dt}}},
      {"ensemble", {{"n_traj", c.n_traj}, {"seed", c.seed}, {"threads", c.threads}, {"hygiene", c.hygiene}}},
      {"output",
       {{"trajectories", c.trajectories_csv},
        {"jumps", c.jumps_csv},
        {"summary", c.summary_json},
        {"observables_csv", c.observables_csv},
        {"observables", obs}}},
  };
}

std::vector<double> interleave(const ComplexMatrix& m) {
  std::vector<double> out;
  for (const auto& row : m) {
    for (const auto& z : row) {
      out.push_back(z.real());
      out.push_back(z.imag());
    }
  }
  return out;
}

std::vector<double> interleave(const std::vector<Complex>& v) {
  std::vector<double> out;
  for (const auto& z : v) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  return out;
}

}  // namespace qfcli
