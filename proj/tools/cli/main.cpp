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

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qfilter/qfilter.h"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kBadConfig = 1, kRunFailed = 2, kIoFailed = 3 };

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::string> scheme;
  std::optional<std::size_t> trajectories;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool master_only = false;
  bool quiet = false;
};

// Thrown when a C call fails; carries the exit code it maps to.
struct RunError {
  int code;
  std::string message;
};

struct IoError {
  std::string message;
};

void check(qf_status st, const char* what) {
  if (st == QF_OK) return;
  const int code = st == QF_ERR_INVALID_ARGUMENT ? kBadConfig : kRunFailed;
  throw RunError{code, std::string(what) + ": " + qf_status_name(st) + ": " + qf_last_error()};
}

struct Span {
  const double* data = nullptr;
  std::size_t size = 0;
  double operator[](std::size_t i) const { return data[i]; }
};

// Owns the handles created for one run.
struct Handles {
  qf_problem* problem = nullptr;
  qf_master* master = nullptr;
  qf_ensemble* ensemble = nullptr;
  ~Handles() {
    qf_ensemble_destroy(ensemble);
    qf_master_destroy(master);
    qf_problem_destroy(problem);
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError{"cannot open " + path.string() + " for writing"};
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError{"write to " + path.string() + " failed"};
}

struct EnsembleView {
  Span mean, stderr_;
  std::vector<std::size_t> indices;  // successful stored trajectories
  std::vector<Span> curves;
  std::vector<Span> jumps;
  qf_ensemble_summary summary{};
  double max_deviation = 0.0;
};

EnsembleView collect(const qf_ensemble* e, const Span& master_pe) {
  EnsembleView v;
  check(qf_ensemble_get_summary(e, &v.summary), "ensemble summary");
  check(qf_ensemble_mean(e, "pe", &v.mean.data, &v.mean.size), "ensemble mean");
  check(qf_ensemble_stderr(e, "pe", &v.stderr_.data, &v.stderr_.size), "ensemble stderr");
  std::size_t stored = 0;
  check(qf_ensemble_n_stored(e, &stored), "stored trajectories");
  for (std::size_t i = 0; i < stored; ++i) {
    int aborted = 0;
    check(qf_ensemble_aborted(e, i, &aborted), "abort flag");
    if (aborted) continue;
    Span c, j;
    check(qf_ensemble_trajectory(e, i, "pe", &c.data, &c.size), "trajectory");
    check(qf_ensemble_jump_times(e, i, &j.data, &j.size), "jump times");
    v.indices.push_back(i);
    v.curves.push_back(c);
    v.jumps.push_back(j);
  }
  for (std::size_t k = 0; k < v.mean.size; ++k) {
    v.max_deviation = std::max(v.max_deviation, std::abs(v.mean[k] - master_pe[k]));
  }
  return v;
}

void write_trajectories(const fs::path& path, const Span& t, const Span& master, const EnsembleView* ens) {
  std::ofstream out = open_output(path);
  if (ens == nullptr) {
    out << "t,pe_master\n";
    for (std::size_t k = 0; k < t.size; ++k) out << fmt(t[k]) << ',' << fmt(master[k]) << '\n';
  } else {
    out << "t,pe_mean,pe_stderr,pe_master";
    for (std::size_t i : ens->indices) out << ",pe_traj_" << i;
    out << '\n';
    for (std::size_t k = 0; k < t.size; ++k) {
      out << fmt(t[k]) << ',' << fmt(ens->mean[k]) << ',' << fmt(ens->stderr_[k]) << ',' << fmt(master[k]);
      for (const Span& c : ens->curves) out << ',' << fmt(c[k]);
      out << '\n';
    }
  }
  finish(out, path);
}

void write_jumps(const fs::path& path, const EnsembleView& ens) {
  std::ofstream out = open_output(path);
  out << "traj_index,jump_time\n";
  for (std::size_t n = 0; n < ens.indices.size(); ++n) {
    for (std::size_t j = 0; j < ens.jumps[n].size; ++j) out << ens.indices[n] << ',' << fmt(ens.jumps[n][j]) << '\n';
  }
  finish(out, path);
}

void write_observables(const fs::path& path, const qfcli::RunConfig& cfg, const Span& t, qf_master* master,
                       qf_ensemble* ens) {
  std::ofstream out = open_output(path);
  std::vector<Span> cols;
  out << 't';
  for (const auto& [name, op] : cfg.observables) {
    Span m;
    check(qf_master_curve(master, name.c_str(), &m.data, &m.size), "observable master curve");
    out << ',' << name << "_master";
    cols.push_back(m);
    if (ens != nullptr) {
      Span mean, se;
      check(qf_ensemble_mean(ens, name.c_str(), &mean.data, &mean.size), "observable mean");
      check(qf_ensemble_stderr(ens, name.c_str(), &se.data, &se.size), "observable stderr");
      out << ',' << name << "_mean," << name << "_stderr";
      cols.push_back(mean);
      cols.push_back(se);
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < t.size; ++k) {
    out << fmt(t[k]);
    for (const Span& c : cols) out << ',' << fmt(c[k]);
    out << '\n';
  }
  finish(out, path);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

int run(const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();

  qfcli::RunConfig cfg;
  try {
    cfg = qfcli::load_config(flags.config);
    if (flags.scheme) {
      qfcli::check_scheme(*flags.scheme);
      cfg.scheme = *flags.scheme;
    }
    if (flags.trajectories) {
      if (*flags.trajectories == 0) throw qfcli::ConfigError("ensemble.n_traj", "must be at least 1");
      cfg.n_traj = *flags.trajectories;
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
  } catch (const qfcli::ConfigError& e) {
    std::cerr << "qfilter: malformed config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "qfilter: " << e.what() << '\n';
    return kIoFailed;
  }

  const std::vector<double> s = qfcli::interleave(cfg.s);
  const std::vector<double> l = qfcli::interleave(cfg.l);
  const std::vector<double> h = qfcli::interleave(cfg.h);
  const std::vector<double> psi = qfcli::interleave(cfg.psi0);

  qf_problem_desc desc;
  qf_problem_desc_default(&desc);
  desc.dim = cfg.dim();
  desc.s = s.data();
  desc.l = l.data();
  desc.h = h.data();
  desc.psi0 = psi.data();
  desc.excited_index = cfg.excited_index;
  desc.omega = cfg.omega;
  desc.t0 = cfg.t0;
  desc.r = cfg.r;
  desc.theta = cfg.theta;
  desc.scheme = cfg.scheme == "hd-pc" ? QF_SCHEME_HD_PC : QF_SCHEME_HD_HD;
  desc.t_start = cfg.t_start;
  desc.t_end = cfg.t_end;
  desc.dt = cfg.dt;

  Handles hd;
  if (qf_problem_create(&desc, &hd.problem) != QF_OK) {
    std::cerr << "qfilter: malformed config: system: " << qf_last_error() << '\n';
    return kBadConfig;
  }
  for (const auto& [name, op] : cfg.observables) {
    const std::vector<double> flat = qfcli::interleave(op);
    if (qf_problem_add_observable(hd.problem, name.c_str(), flat.data()) != QF_OK) {
      std::cerr << "qfilter: malformed config: output.observables." << name << ": " << qf_last_error() << '\n';
      return kBadConfig;
    }
  }

  try {
    fs::create_directories(flags.out);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "qfilter: cannot create output directory: " << e.what() << '\n';
    return kIoFailed;
  }
  const fs::path out_dir(flags.out);

  try {
    check(qf_solve_master(hd.problem, &hd.master), "master solve");
    Span t, pe;
    check(qf_master_times(hd.master, &t.data, &t.size), "master times");
    check(qf_master_curve(hd.master, "pe", &pe.data, &pe.size), "master curve");
    double expected_jumps = 0.0;
    check(qf_master_expected_jumps(hd.master, &expected_jumps), "expected jumps");
    const std::size_t peak = static_cast<std::size_t>(std::max_element(pe.data, pe.data + pe.size) - pe.data);

    json summary;
    summary["config"] = qfcli::to_json(cfg);
    summary["master"] = {{"peak_pe", pe[peak]}, {"peak_time", t[peak]}, {"expected_jumps", expected_jumps}};

    std::optional<EnsembleView> ens;
    if (!flags.master_only) {
      qf_ensemble_options opts;
      qf_ensemble_options_default(&opts);
      opts.n_traj = cfg.n_traj;
      opts.seed = cfg.seed;
      opts.threads = cfg.threads;
      opts.hygiene = cfg.hygiene ? 1 : 0;
      opts.keep_trajectories = 1;
      opts.attach_master = 0;
      check(qf_run_ensemble(hd.problem, &opts, &hd.ensemble), "ensemble");
      ens = collect(hd.ensemble, pe);
      const qf_ensemble_summary& s = ens->summary;
      summary["ensemble"] = {
          {"n_requested", s.n_requested},
          {"n_traj", s.n_traj},
          {"n_aborted", s.n_aborted},
          {"max_mean_master_deviation_pe", ens->max_deviation},
          {"jumps",
           {{"mean", s.jumps_mean},
            {"stderr", s.jumps_stderr},
            {"min", s.jumps_min},
            {"max", s.jumps_max},
            {"total", s.jumps_total}}},
          {"diagnostics",
           {{"max_trace_defect", s.max_trace_defect},
            {"max_hermiticity_defect", s.max_hermiticity_defect},
            {"max_coherence_defect", s.max_coherence_defect},
            {"large_click_probability_warnings", s.warnings},
            {"nu_clamps", s.nu_clamps},
            {"positivity_clips", s.positivity_clips},
            {"min_raw_nu", s.min_raw_nu}}},
      };
      if (!flags.quiet && s.warnings > 0) {
        std::cerr << "qfilter: warning: click probability reached 0.1 in " << s.warnings
                  << " steps; consider a smaller dt\n";
      }
    } else {
      summary["ensemble"] = nullptr;
    }

    write_trajectories(out_dir / cfg.trajectories_csv, t, pe, ens ? &*ens : nullptr);
    if (ens && cfg.scheme == "hd-pc") write_jumps(out_dir / cfg.jumps_csv, *ens);
    if (!cfg.observables.empty()) write_observables(out_dir / cfg.observables_csv, cfg, t, hd.master, hd.ensemble);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    summary["wall_time_s"] = wall;
    write_json(out_dir / cfg.summary_json, summary);

    if (!flags.quiet) {
      std::cout << "master peak P_e = " << fmt(pe[peak]) << " at t = " << fmt(t[peak]);
      if (ens) {
        std::cout << "; " << ens->summary.n_traj << " trajectories, max |mean - master| = "
                  << fmt(ens->max_deviation);
      }
      std::cout << "; wrote " << out_dir.string() << " in " << fmt(wall) << " s\n";
    }
  } catch (const RunError& e) {
    std::cerr << "qfilter: " << e.message << '\n';
    return e.code;
  } catch (const IoError& e) {
    std::cerr << "qfilter: " << e.message << '\n';
    return kIoFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon quantum filtering: master equation and conditional ensembles"};
  Flags flags;
  app.add_option("--config", flags.config, "Run configuration (JSON)")->required();
  app.add_option("--out", flags.out, "Output directory")->capture_default_str();
  app.add_option("--scheme", flags.scheme, "Override the measurement scheme (hd-pc or hd-hd)");
  app.add_option("--trajectories", flags.trajectories, "Override the number of trajectories");
  app.add_option("--seed", flags.seed, "Override the ensemble seed");
  app.add_option("--threads", flags.threads, "Worker threads, 0 for one per core");
  app.add_flag("--master-only", flags.master_only, "Solve only the unconditional master hierarchy");
  app.add_flag("--quiet", flags.quiet, "Suppress the progress line and warnings");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }
  return run(flags);
}
