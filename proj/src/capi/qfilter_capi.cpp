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

#include "qfilter/qfilter.h"

#include <algorithm>
#include <memory>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/integrator.hpp"

using namespace qfilter;

struct qf_problem {
  std::size_t dim;
  std::size_t excited_index;
  std::optional<FilterContext> ctx;
  HierarchyState initial;
  TimeGrid grid;
  std::vector<Observable> observables;
};

struct qf_master {
  MasterCurve curve;
};

struct qf_ensemble {
  EnsembleResult result;
};

namespace {

thread_local std::string g_last_error;

qf_status fail(qf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs the body, translating library exceptions into status codes.
template <typename F>
qf_status guarded(F&& body) {
  try {
    body();
    return QF_OK;
  } catch (const EnsembleFailed& e) {
    return fail(QF_ERR_ENSEMBLE_FAILED, e.what());
  } catch (const IllConditionedJump& e) {
    return fail(QF_ERR_ILL_CONDITIONED_JUMP, e.what());
  } catch (const InvariantViolation& e) {
    return fail(QF_ERR_INVARIANT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(QF_ERR_NOT_FOUND, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(QF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QF_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

Operator read_operator(const double* data, std::size_t dim, const char* field) {
  if (data == nullptr) throw std::invalid_argument(std::string(field) + ": null pointer");
  std::vector<Complex> entries(dim * dim);
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = Complex(data[2 * i], data[2 * i + 1]);
  return Operator::from_row_major(dim, entries);
}

qf_status view(const std::vector<double>& v, const double** data, std::size_t* len) {
  if (data == nullptr || len == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null output pointer");
  *data = v.data();
  *len = v.size();
  return QF_OK;
}

}  // namespace

extern "C" {

const char* qf_version(void) { return "0.1.0"; }

const char* qf_last_error(void) { return g_last_error.c_str(); }

const char* qf_status_name(qf_status status) {
  switch (status) {
    case QF_OK: return "ok";
    case QF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QF_ERR_INVARIANT: return "invariant violation";
    case QF_ERR_ILL_CONDITIONED_JUMP: return "ill-conditioned jump";
    case QF_ERR_ENSEMBLE_FAILED: return "ensemble failed";
    case QF_ERR_NOT_FOUND: return "not found";
    case QF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void qf_problem_desc_default(qf_problem_desc* desc) {
  if (desc == nullptr) return;
  *desc = qf_problem_desc{};
  desc->omega = 1.46;
  desc->t0 = 4.0;
  desc->r = 0.0;
  desc->theta = 0.0;
  desc->scheme = QF_SCHEME_HD_HD;
  desc->t_start = 0.0;
  desc->t_end = 10.0;
  desc->dt = 1e-3;
}

qf_status qf_problem_create(const qf_problem_desc* desc, qf_problem** out) {
  if (out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    require(desc != nullptr, "null problem description");
    require(desc->dim >= 1, "dim must be at least 1");
    require(desc->excited_index < desc->dim, "excited_index must be below dim");
    require(desc->scheme == QF_SCHEME_HD_PC || desc->scheme == QF_SCHEME_HD_HD, "unknown scheme");
    require(desc->psi0 != nullptr, "psi0: null pointer");
    const std::size_t d = desc->dim;

    const SlhModel system = SlhModel::single(read_operator(desc->s, d, "S"), read_operator(desc->l, d, "L"),
                                             read_operator(desc->h, d, "H"));
    const BeamSplitterParams bs{desc->r, desc->theta};
    validate(bs);
    const TimeGrid grid{desc->t_start, desc->t_end, desc->dt};
    grid.validate();
    std::vector<Complex> psi(d);
    for (std::size_t i = 0; i < d; ++i) psi[i] = Complex(desc->psi0[2 * i], desc->psi0[2 * i + 1]);

    auto p = std::make_unique<qf_problem>(qf_problem{
        d, desc->excited_index, std::nullopt, HierarchyState::initial(psi), grid, {}});
    p->ctx.emplace(system, WavePacket::gaussian(desc->omega, desc->t0), bs,
                   desc->scheme == QF_SCHEME_HD_PC ? Scheme::HdPc : Scheme::HdHd, desc->discard_channel2 != 0);
    p->observables.push_back({"pe", Operator::basis_outer(d, desc->excited_index, desc->excited_index)});
    *out = p.release();
  });
}

void qf_problem_destroy(qf_problem* problem) { delete problem; }

qf_status qf_problem_add_observable(qf_problem* problem, const char* name, const double* op) {
  return guarded([&] {
    require(problem != nullptr, "null problem");
    require(name != nullptr && *name != '\0', "observable name must be non-empty");
    const std::string n(name);
    for (const auto& o : problem->observables) {
      require(o.name != n, "duplicate observable name");
    }
    problem->observables.push_back({n, read_operator(op, problem->dim, name)});
  });
}

qf_status qf_problem_n_points(const qf_problem* problem, size_t* out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    *out = problem->grid.n_points();
  });
}

qf_status qf_solve_master(const qf_problem* problem, qf_master** out) {
  if (out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    require(problem != nullptr, "null problem");
    auto m = std::make_unique<qf_master>();
    m->curve = solve_master(*problem->ctx, problem->initial, problem->grid, problem->observables);
    *out = m.release();
  });
}

void qf_master_destroy(qf_master* master) { delete master; }

qf_status qf_master_times(const qf_master* master, const double** data, size_t* len) {
  if (master == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null master");
  return view(master->curve.times, data, len);
}

qf_status qf_master_curve(const qf_master* master, const char* name, const double** data, size_t* len) {
  const std::vector<double>* curve = nullptr;
  const qf_status st = guarded([&] {
    require(master != nullptr && name != nullptr, "null argument");
    curve = &master->curve.curve(name);
  });
  return st == QF_OK ? view(*curve, data, len) : st;
}

qf_status qf_master_nu(const qf_master* master, const double** data, size_t* len) {
  if (master == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null master");
  return view(master->curve.nu, data, len);
}

qf_status qf_master_expected_jumps(const qf_master* master, double* out) {
  if (master == nullptr || out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null argument");
  *out = master->curve.expected_jumps;
  return QF_OK;
}

void qf_ensemble_options_default(qf_ensemble_options* options) {
  if (options == nullptr) return;
  const EnsembleOptions d;
  options->n_traj = d.n_traj;
  options->seed = d.seed;
  options->threads = d.threads;
  options->keep_trajectories = d.keep_trajectories ? 1 : 0;
  options->hygiene = d.trajectory.hygiene ? 1 : 0;
  options->attach_master = d.attach_master ? 1 : 0;
  options->max_abort_fraction = d.max_abort_fraction;
}

qf_status qf_run_ensemble(const qf_problem* problem, const qf_ensemble_options* options, qf_ensemble** out) {
  if (out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    require(problem != nullptr && options != nullptr, "null argument");
    require(options->n_traj >= 1, "n_traj must be at least 1");
    require(options->max_abort_fraction >= 0.0, "max_abort_fraction must be non-negative");
    EnsembleOptions o;
    o.n_traj = options->n_traj;
    o.seed = options->seed;
    o.threads = options->threads;
    o.keep_trajectories = options->keep_trajectories != 0;
    o.attach_master = options->attach_master != 0;
    o.max_abort_fraction = options->max_abort_fraction;
    o.trajectory.hygiene = options->hygiene != 0;
    auto e = std::make_unique<qf_ensemble>();
    e->result = run_ensemble(*problem->ctx, problem->initial, problem->grid, problem->observables, o);
    *out = e.release();
  });
}

void qf_ensemble_destroy(qf_ensemble* ensemble) { delete ensemble; }

qf_status qf_ensemble_get_summary(const qf_ensemble* ensemble, qf_ensemble_summary* out) {
  return guarded([&] {
    require(ensemble != nullptr && out != nullptr, "null argument");
    const EnsembleSummary& s = ensemble->result.summary;
    qf_ensemble_summary r{};
    r.n_requested = s.n_requested;
    r.n_traj = s.n_traj;
    r.n_aborted = s.n_aborted;
    r.jumps_mean = s.jumps.mean;
    r.jumps_stderr = s.jumps.stderr_;
    r.jumps_min = s.jumps.min;
    r.jumps_max = s.jumps.max;
    r.jumps_total = s.jumps.total;
    r.max_trace_defect = s.max_defects.trace;
    r.max_hermiticity_defect = s.max_defects.hermiticity;
    r.max_coherence_defect = s.max_defects.coherence;
    r.warnings = s.warnings;
    r.nu_clamps = s.nu_clamps;
    r.positivity_clips = s.positivity_clips;
    r.min_raw_nu = s.min_raw_nu;
    r.has_master = s.master ? 1 : 0;
    if (s.master) {
      r.expected_jumps = s.master->expected_jumps;
      r.max_master_deviation_pe = s.max_master_deviation("pe");
    }
    *out = r;
  });
}

qf_status qf_ensemble_times(const qf_ensemble* ensemble, const double** data, size_t* len) {
  if (ensemble == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null ensemble");
  return view(ensemble->result.summary.times, data, len);
}

qf_status qf_ensemble_mean(const qf_ensemble* ensemble, const char* name, const double** data, size_t* len) {
  const std::vector<double>* v = nullptr;
  const qf_status st = guarded([&] {
    require(ensemble != nullptr && name != nullptr, "null argument");
    v = &ensemble->result.summary.stats_for(name).mean;
  });
  return st == QF_OK ? view(*v, data, len) : st;
}

qf_status qf_ensemble_stderr(const qf_ensemble* ensemble, const char* name, const double** data, size_t* len) {
  const std::vector<double>* v = nullptr;
  const qf_status st = guarded([&] {
    require(ensemble != nullptr && name != nullptr, "null argument");
    v = &ensemble->result.summary.stats_for(name).stderr_;
  });
  return st == QF_OK ? view(*v, data, len) : st;
}

qf_status qf_ensemble_master(const qf_ensemble* ensemble, const char* name, const double** data, size_t* len) {
  const std::vector<double>* v = nullptr;
  const qf_status st = guarded([&] {
    require(ensemble != nullptr && name != nullptr, "null argument");
    const auto& master = ensemble->result.summary.master;
    if (!master) throw std::out_of_range("no master curve attached to this ensemble");
    v = &master->curve(name);
  });
  return st == QF_OK ? view(*v, data, len) : st;
}

qf_status qf_ensemble_n_stored(const qf_ensemble* ensemble, size_t* out) {
  if (ensemble == nullptr || out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null argument");
  *out = ensemble->result.trajectories.size();
  return QF_OK;
}

qf_status qf_ensemble_aborted(const qf_ensemble* ensemble, size_t index, int* out) {
  if (ensemble == nullptr || out == nullptr) return fail(QF_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= ensemble->result.aborted.size()) return fail(QF_ERR_NOT_FOUND, "trajectory index out of range");
  *out = ensemble->result.aborted[index] ? 1 : 0;
  return QF_OK;
}

qf_status qf_ensemble_trajectory(const qf_ensemble* ensemble, size_t index, const char* name, const double** data,
                                 size_t* len) {
  const std::vector<double>* v = nullptr;
  const qf_status st = guarded([&] {
    require(ensemble != nullptr && name != nullptr, "null argument");
    const auto& trajs = ensemble->result.trajectories;
    if (index >= trajs.size()) throw std::out_of_range("trajectory index out of range or not stored");
    if (ensemble->result.aborted[index]) throw std::out_of_range("trajectory " + std::to_string(index) + " aborted");
    v = &trajs[index].curve(name);
  });
  return st == QF_OK ? view(*v, data, len) : st;
}

qf_status qf_ensemble_jump_times(const qf_ensemble* ensemble, size_t index, const double** data, size_t* len) {
  const std::vector<double>* v = nullptr;
  const qf_status st = guarded([&] {
    require(ensemble != nullptr, "null argument");
    const auto& trajs = ensemble->result.trajectories;
    if (index >= trajs.size()) throw std::out_of_range("trajectory index out of range or not stored");
    v = &trajs[index].jump_times;
  });
  return st == QF_OK ? view(*v, data, len) : st;
}

}  // extern "C"
