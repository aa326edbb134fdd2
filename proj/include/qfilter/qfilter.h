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

/* C interface to the qfilter single-photon filtering simulator.
 *
 * Objects are opaque handles created by qf_*_create / qf_solve_master /
 * qf_run_ensemble and released by the matching *_destroy call. Every
 * fallible call returns a qf_status; on failure qf_last_error() holds a
 * message for the calling thread until its next failing call.
 *
 * Complex arrays are interleaved (re, im) doubles. Square operators are
 * row-major, so an operator of dimension d takes 2*d*d doubles.
 *
 * Arrays handed out by accessors are owned by the object they came from and
 * stay valid until it is destroyed. */

#ifndef QFILTER_QFILTER_H_
#define QFILTER_QFILTER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QF_API __declspec(dllexport)
#else
#define QF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qf_status {
  QF_OK = 0,
  QF_ERR_INVALID_ARGUMENT = 1,  /* malformed input; nothing was computed */
  QF_ERR_INVARIANT = 2,         /* the state left its invariants during a solve */
  QF_ERR_ILL_CONDITIONED_JUMP = 3,
  QF_ERR_ENSEMBLE_FAILED = 4,   /* too many trajectories aborted */
  QF_ERR_NOT_FOUND = 5,         /* unknown curve name or index */
  QF_ERR_INTERNAL = 6
} qf_status;

typedef enum qf_scheme {
  QF_SCHEME_HD_PC = 0,  /* homodyne on output 1, photon counting on output 2 */
  QF_SCHEME_HD_HD = 1   /* homodyne on both outputs */
} qf_scheme;

typedef struct qf_problem qf_problem;
typedef struct qf_master qf_master;
typedef struct qf_ensemble qf_ensemble;

typedef struct qf_problem_desc {
  size_t dim;            /* system dimension */
  const double* s;       /* scattering operator, 2*dim*dim doubles */
  const double* l;       /* coupling operator */
  const double* h;       /* Hamiltonian */
  const double* psi0;    /* initial system vector, 2*dim doubles, unit norm */
  size_t excited_index;  /* basis index of |e> for the built-in "pe" curve */
  double omega;          /* Gaussian pulse bandwidth */
  double t0;             /* pulse peak time */
  double r;              /* beam-splitter reflectivity in [0, 1] */
  double theta;          /* beam-splitter phase */
  qf_scheme scheme;
  double t_start;
  double t_end;
  double dt;
  int discard_channel2;  /* nonzero: filter on output 1 only */
} qf_problem_desc;

typedef struct qf_ensemble_options {
  size_t n_traj;
  uint64_t seed;
  unsigned threads;           /* 0: one per hardware thread */
  int keep_trajectories;      /* store per-trajectory curves (forced off above 10000) */
  int hygiene;                /* per-step state cleanup */
  int attach_master;          /* also solve the master hierarchy */
  double max_abort_fraction;  /* failure threshold, default 0.01 */
} qf_ensemble_options;

typedef struct qf_ensemble_summary {
  size_t n_requested;
  size_t n_traj;     /* successful trajectories */
  size_t n_aborted;
  double jumps_mean;
  double jumps_stderr;
  size_t jumps_min;
  size_t jumps_max;
  size_t jumps_total;
  double max_trace_defect;
  double max_hermiticity_defect;
  double max_coherence_defect;
  size_t warnings;
  size_t nu_clamps;
  size_t positivity_clips;
  double min_raw_nu;
  int has_master;
  double expected_jumps;      /* from the master solve when attached */
  double max_master_deviation_pe;
} qf_ensemble_summary;

QF_API const char* qf_version(void);
QF_API const char* qf_last_error(void);
QF_API const char* qf_status_name(qf_status status);

/* Problems. The "pe" observable (|e><e| at excited_index) is always present. */
QF_API void qf_problem_desc_default(qf_problem_desc* desc);
QF_API qf_status qf_problem_create(const qf_problem_desc* desc, qf_problem** out);
QF_API void qf_problem_destroy(qf_problem* problem);
QF_API qf_status qf_problem_add_observable(qf_problem* problem, const char* name, const double* op);
QF_API qf_status qf_problem_n_points(const qf_problem* problem, size_t* out);

/* Averaged (master) hierarchy, integrated with RK4. */
QF_API qf_status qf_solve_master(const qf_problem* problem, qf_master** out);
QF_API void qf_master_destroy(qf_master* master);
QF_API qf_status qf_master_times(const qf_master* master, const double** data, size_t* len);
QF_API qf_status qf_master_curve(const qf_master* master, const char* name, const double** data, size_t* len);
QF_API qf_status qf_master_nu(const qf_master* master, const double** data, size_t* len);
QF_API qf_status qf_master_expected_jumps(const qf_master* master, double* out);

/* Conditional trajectories. */
QF_API void qf_ensemble_options_default(qf_ensemble_options* options);
QF_API qf_status qf_run_ensemble(const qf_problem* problem, const qf_ensemble_options* options,
                                 qf_ensemble** out);
QF_API void qf_ensemble_destroy(qf_ensemble* ensemble);
QF_API qf_status qf_ensemble_get_summary(const qf_ensemble* ensemble, qf_ensemble_summary* out);
QF_API qf_status qf_ensemble_times(const qf_ensemble* ensemble, const double** data, size_t* len);
QF_API qf_status qf_ensemble_mean(const qf_ensemble* ensemble, const char* name, const double** data, size_t* len);
QF_API qf_status qf_ensemble_stderr(const qf_ensemble* ensemble, const char* name, const double** data,
                                    size_t* len);
/* QF_ERR_NOT_FOUND when the master curve was not requested. */
QF_API qf_status qf_ensemble_master(const qf_ensemble* ensemble, const char* name, const double** data,
                                    size_t* len);
/* Number of stored trajectories (0 when not kept). */
QF_API qf_status qf_ensemble_n_stored(const qf_ensemble* ensemble, size_t* out);
QF_API qf_status qf_ensemble_aborted(const qf_ensemble* ensemble, size_t index, int* out);
QF_API qf_status qf_ensemble_trajectory(const qf_ensemble* ensemble, size_t index, const char* name,
                                        const double** data, size_t* len);
QF_API qf_status qf_ensemble_jump_times(const qf_ensemble* ensemble, size_t index, const double** data,
                                        size_t* len);

#ifdef __cplusplus
}
#endif

#endif /* QFILTER_QFILTER_H_ */
