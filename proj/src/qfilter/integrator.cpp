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

#include "qfilter/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfilter/errors.hpp"

namespace qfilter {

void TimeGrid::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw std::invalid_argument("grid: t_start, t_end and dt must be finite");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
  if (!(t_end > t_start)) throw std::invalid_argument("grid: t_end must exceed t_start");
}

std::size_t TimeGrid::n_steps() const {
  validate();
  return static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
}

namespace {

const std::vector<double>& find_curve(const std::vector<std::string>& names,
                                      const std::vector<std::vector<double>>& curves, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no curve named '" + name + "'");
  return curves[static_cast<std::size_t>(it - names.begin())];
}

void record_observables(std::vector<std::vector<double>>& curves, const HierarchyState& st,
                        std::span<const Observable> observables) {
  for (std::size_t i = 0; i < observables.size(); ++i) {
    curves[i].push_back(expectation(st, observables[i].op));
  }
}

void track(HierarchyDefects& worst, const HierarchyState& st) {
  const HierarchyDefects d = measure_defects(st);
  worst.trace = std::max(worst.trace, d.trace);
  worst.hermiticity = std::max(worst.hermiticity, d.hermiticity);
  worst.coherence = std::max(worst.coherence, d.coherence);
}

}  // namespace

const std::vector<double>& TrajectoryRecord::curve(const std::string& name) const {
  return find_curve(names, curves, name);
}

const std::vector<double>& MasterCurve::curve(const std::string& name) const {
  return find_curve(names, curves, name);
}

TrajectoryRecord simulate_trajectory(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                                     const NoiseStream& noise, std::span<const Observable> observables,
                                     const TrajectoryOptions& options) {
  const std::size_t n = grid.n_steps();
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double r = ctx.reflection();
  const double eta = ctx.transmission();
  const bool second = !ctx.discard_channel2() && r != 0.0;
  const bool counting = ctx.scheme() == Scheme::HdPc;

  TrajectoryRecord rec;
  rec.times.reserve(n + 1);
  rec.curves.assign(observables.size(), {});
  for (const auto& o : observables) {
    if (o.op.dim() != ctx.dim()) throw std::invalid_argument("observable '" + o.name + "' has the wrong dimension");
    rec.names.push_back(o.name);
  }
  for (auto& c : rec.curves) c.reserve(n + 1);
  if (options.record_measurements) {
    for (auto* v : {&rec.dw1, &rec.dw2, &rec.record_y1, &rec.record_y2}) {
      v->reserve(n + 1);
      v->push_back(0.0);
    }
  }

  HierarchyState st = initial;
  if (options.hygiene) apply_hygiene(st);
  rec.times.push_back(grid.time(0));
  record_observables(rec.curves, st, observables);
  track(rec.max_defects, st);

  bool warned = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time(k);
    try {
      NoiseIncrement inc;
      inc.dw1 = sqrt_dt * noise.gaussian(NoiseStream::Channel::Homodyne1, k);
      double y2 = 0.0;
      const HomodyneGains gains = k1_k2_gains(ctx, st, t);
      if (counting) {
        if (second) {
          const double raw_nu = nu_intensity_raw(ctx, st, t);
          if (raw_nu < 0.0) ++rec.nu_clamps;
          rec.min_raw_nu = std::min(rec.min_raw_nu, raw_nu);
          const double p = r * r * std::max(raw_nu, 0.0) * dt;
          rec.max_jump_probability = std::max(rec.max_jump_probability, p);
          if (p >= options.jump_probability_warning && !warned) {
            rec.warnings.push_back("click probability per step reached " + std::to_string(p) + " at t=" +
                                   std::to_string(t) + "; dt is too coarse for first-order thinning");
            warned = true;
          }
          inc.jump = noise.uniform(NoiseStream::Channel::Counting, k) < std::clamp(p, 0.0, 1.0);
          y2 = inc.jump ? 1.0 : 0.0;
        }
      } else {
        inc.dw2 = sqrt_dt * noise.gaussian(NoiseStream::Channel::Homodyne2, k);
        // dY2 = dW2 + i r K2 dt; i K2 is real.
        y2 = inc.dw2 + r * (kI * gains.k2).real() * dt;
      }

      st += filter_delta(ctx, st, t, dt, inc);
      if (options.hygiene && apply_hygiene(st)) ++rec.positivity_clips;

      if (inc.jump) {
        rec.jump_times.push_back(grid.time(k + 1));
        if (rec.jump_times.size() > options.max_jumps) {
          throw InvariantViolation("more than " + std::to_string(options.max_jumps) + " clicks in one trajectory");
        }
      }
      if (options.record_measurements) {
        rec.dw1.push_back(inc.dw1);
        rec.dw2.push_back(inc.dw2);
        rec.record_y1.push_back(inc.dw1 + eta * gains.k1 * dt);
        rec.record_y2.push_back(y2);
      }
      rec.times.push_back(grid.time(k + 1));
      record_observables(rec.curves, st, observables);
      track(rec.max_defects, st);
      for (const auto& c : rec.curves) {
        if (!std::isfinite(c.back())) throw InvariantViolation("observable expectation is not finite");
      }
    } catch (const TrajectoryAborted&) {
      throw;
    } catch (const std::exception& e) {
      throw TrajectoryAborted(std::string(e.what()) + " (step " + std::to_string(k) + ")", k, t, describe(st));
    }
  }
  return rec;
}

HierarchyState rk4_master_step(const FilterContext& ctx, const HierarchyState& st, double t, double dt) {
  const HierarchyState k1 = master_drift(ctx, st, t);
  const HierarchyState k2 = master_drift(ctx, st + Complex(0.5 * dt) * k1, t + 0.5 * dt);
  const HierarchyState k3 = master_drift(ctx, st + Complex(0.5 * dt) * k2, t + 0.5 * dt);
  const HierarchyState k4 = master_drift(ctx, st + Complex(dt) * k3, t + dt);
  HierarchyState out = st;
  out += Complex(dt / 6.0) * k1;
  out += Complex(dt / 3.0) * k2;
  out += Complex(dt / 3.0) * k3;
  out += Complex(dt / 6.0) * k4;
  return out;
}

MasterCurve solve_master(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                         std::span<const Observable> observables) {
  const std::size_t n = grid.n_steps();
  const double r2 = ctx.discard_channel2() ? 0.0 : ctx.reflection() * ctx.reflection();
  MasterCurve mc;
  mc.curves.assign(observables.size(), {});
  for (const auto& o : observables) {
    if (o.op.dim() != ctx.dim()) throw std::invalid_argument("observable '" + o.name + "' has the wrong dimension");
    mc.names.push_back(o.name);
  }

  HierarchyState st = initial;
  auto sample = [&](std::size_t k) {
    const double t = grid.time(k);
    mc.times.push_back(t);
    record_observables(mc.curves, st, observables);
    mc.nu.push_back(nu_intensity(ctx, st, t));
    mc.trace_rho11.push_back(st.rho11.trace().real());
    for (const auto& c : mc.curves) {
      if (!std::isfinite(c.back())) {
        throw InvariantViolation("master solve produced a non-finite value at t=" + std::to_string(t));
      }
    }
  };
  sample(0);
  for (std::size_t k = 0; k < n; ++k) {
    st = rk4_master_step(ctx, st, grid.time(k), grid.dt);
    sample(k + 1);
  }
  for (std::size_t k = 0; k < n; ++k) {
    mc.expected_jumps += 0.5 * grid.dt * r2 * (mc.nu[k] + mc.nu[k + 1]);
  }
  return mc;
}

}  // namespace qfilter
