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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qfilter/noise_stream.hpp"
#include "qfilter/sme_filters.hpp"

namespace qfilter {

/// Uniform grid t_k = t_start + k dt, k = 0..n_steps.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 10.0;
  double dt = 1e-3;

  /// Throws std::invalid_argument for dt <= 0, t_end <= t_start or
  /// non-finite values.
  void validate() const;
  std::size_t n_steps() const;
  std::size_t n_points() const { return n_steps() + 1; }
  double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
};

struct Observable {
  std::string name;
  Operator op;
};

struct TrajectoryOptions {
  bool hygiene = true;               // per-step cleanup, see apply_hygiene()
  bool record_measurements = true;   // keep dW and dY streams
  std::size_t max_jumps = 100;       // diagnostic cap on clicks per trajectory
  double jump_probability_warning = 0.1;
};

/// One conditional trajectory. Curves, records and times share the grid
/// length; record entry k is the increment over [t_{k-1}, t_k] (entry 0 is 0).
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> curves;  // Tr[rho11 O] per observable
  std::vector<double> jump_times;           // HdPc only
  std::vector<double> dw1, dw2;             // sampled innovations
  std::vector<double> record_y1, record_y2; // reconstructed measurement increments
  HierarchyDefects max_defects;             // worst invariant defects seen along the run
  double max_jump_probability = 0.0;
  double min_raw_nu = 0.0;                  // lowest unclamped click intensity (HdPc)
  std::size_t nu_clamps = 0;                // steps where it was clamped up to 0
  std::size_t positivity_clips = 0;         // steps where hygiene clipped an eigenvalue
  std::vector<std::string> warnings;

  const std::vector<double>& curve(const std::string& name) const;
};

/// Euler-Maruyama jump-diffusion integration of the selected filter.
/// Channel noise is drawn from `noise`; clicks are Bernoulli with
/// p = min(r^2 nu dt, 1). Failures inside the step loop are rethrown as
/// TrajectoryAborted carrying the step index and a state snapshot.
TrajectoryRecord simulate_trajectory(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                                     const NoiseStream& noise, std::span<const Observable> observables,
                                     const TrajectoryOptions& options = {});

/// Noise-averaged hierarchy integrated with classical RK4.
struct MasterCurve {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> curves;
  std::vector<double> nu;         // nu evaluated on the averaged hierarchy
  double expected_jumps = 0.0;    // int r^2 nu dt (trapezoid), HdPc click count mean
  std::vector<double> trace_rho11;

  const std::vector<double>& curve(const std::string& name) const;
};

MasterCurve solve_master(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                         std::span<const Observable> observables);

/// One classical RK4 step of the master hierarchy.
HierarchyState rk4_master_step(const FilterContext& ctx, const HierarchyState& st, double t, double dt);

}  // namespace qfilter
