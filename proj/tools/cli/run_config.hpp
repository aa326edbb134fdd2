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

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qfcli {

using Complex = std::complex<double>;
using ComplexMatrix = std::vector<std::vector<Complex>>;

// Carries the dotted path of the field that failed to parse.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  // system
  ComplexMatrix s, l, h;
  std::vector<Complex> psi0;
  std::size_t excited_index = 0;
  // wavepacket
  double omega = 1.46;
  double t0 = 4.0;
  // beamsplitter
  double r = 0.0;
  double theta = 0.0;
  std::string scheme = "hd-hd";
  // grid
  double t_start = 0.0;
  double t_end = 10.0;
  double dt = 1e-3;
  // ensemble
  std::size_t n_traj = 72;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool hygiene = true;
  // output
  std::string trajectories_csv = "trajectories.csv";
  std::string jumps_csv = "jumps.csv";
  std::string summary_json = "summary.json";
  std::string observables_csv = "observables.csv";
  std::map<std::string, ComplexMatrix> observables;

  std::size_t dim() const { return l.size(); }

  bool operator==(const RunConfig&) const = default;
};

// Parses and validates; throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

// Validates scheme spelling; throws ConfigError on "scheme".
void check_scheme(const std::string& scheme);

// Row-major interleaved re/im, the layout the C interface expects.
std::vector<double> interleave(const ComplexMatrix& m);
std::vector<double> interleave(const std::vector<Complex>& v);

}  // namespace qfcli
