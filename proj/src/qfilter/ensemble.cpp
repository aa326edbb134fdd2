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

#include "qfilter/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qfilter {

double excitation_probability_raw(const Operator& rho11, std::size_t excited_index) {
  if (excited_index >= rho11.dim()) {
    throw std::out_of_range("excitation_probability: excited index outside the system space");
  }
  return rho11(excited_index, excited_index).real();
}

double excitation_probability(const Operator& rho11, std::size_t excited_index) {
  return std::clamp(excitation_probability_raw(rho11, excited_index), 0.0, 1.0);
}

const CurveStats& EnsembleSummary::stats_for(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no ensemble curve named '" + name + "'");
  return stats[static_cast<std::size_t>(it - names.begin())];
}

double EnsembleSummary::max_master_deviation(const std::string& name) const {
  if (!master) throw std::logic_error("max_master_deviation: no master curve attached");
  const auto& mean = stats_for(name).mean;
  const auto& ref = master->curve(name);
  double worst = 0.0;
  for (std::size_t k = 0; k < mean.size(); ++k) worst = std::max(worst, std::abs(mean[k] - ref[k]));
  return worst;
}

namespace {

constexpr std::size_t kBlockSize = 32;

// Running mean / sum of squared deviations for every observable curve.
struct Moments {
  std::size_t count = 0;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> m2;

  void init(std::size_t n_obs, std::size_t n_points) {
    mean.assign(n_obs, std::vector<double>(n_points, 0.0));
    m2.assign(n_obs, std::vector<double>(n_points, 0.0));
  }

  void add(const TrajectoryRecord& rec) {
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t o = 0; o < mean.size(); ++o) {
      const auto& x = rec.curves[o];
      auto& mu = mean[o];
      auto& s = m2[o];
      for (std::size_t k = 0; k < mu.size(); ++k) {
        const double delta = x[k] - mu[k];
        mu[k] += delta * inv;
        s[k] += delta * (x[k] - mu[k]);
      }
    }
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    for (std::size_t o = 0; o < mean.size(); ++o) {
      for (std::size_t k = 0; k < mean[o].size(); ++k) {
        const double delta = other.mean[o][k] - mean[o][k];
        mean[o][k] += delta * nb / n;
        m2[o][k] += other.m2[o][k] + delta * delta * na * nb / n;
      }
    }
    count += other.count;
  }
};

struct BlockResult {
  Moments moments;
  HierarchyDefects defects;
  std::size_t warnings = 0;
  double min_raw_nu = 0.0;
  std::size_t nu_clamps = 0;
  std::size_t positivity_clips = 0;
  std::vector<AbortInfo> aborts;
};

}  // namespace

EnsembleResult run_ensemble(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                            std::span<const Observable> observables, const EnsembleOptions& options) {
  if (options.n_traj == 0) throw std::invalid_argument("run_ensemble: at least one trajectory is required");
  if (options.n_traj > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("run_ensemble: too many trajectories");
  }
  const std::size_t m = options.n_traj;
  const std::size_t n_points = grid.n_points();
  const bool keep = options.keep_trajectories && m <= EnsembleOptions::kMaxStoredTrajectories;
  const std::size_t n_blocks = (m + kBlockSize - 1) / kBlockSize;

  EnsembleResult result;
  if (keep) result.trajectories.resize(m);
  result.aborted.assign(m, false);
  std::vector<std::size_t> jump_counts(m, 0);
  std::vector<BlockResult> blocks(n_blocks);

  auto run_block = [&](std::size_t b) {
    BlockResult& out = blocks[b];
    out.moments.init(observables.size(), n_points);
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(m, begin + kBlockSize);
    for (std::size_t i = begin; i < end; ++i) {
      const NoiseStream noise(options.seed, static_cast<std::uint32_t>(i));
      try {
        TrajectoryRecord rec = simulate_trajectory(ctx, initial, grid, noise, observables, options.trajectory);
        out.moments.add(rec);
        out.defects.trace = std::max(out.defects.trace, rec.max_defects.trace);
        out.defects.hermiticity = std::max(out.defects.hermiticity, rec.max_defects.hermiticity);
        out.defects.coherence = std::max(out.defects.coherence, rec.max_defects.coherence);
        out.warnings += rec.warnings.size();
        out.min_raw_nu = std::min(out.min_raw_nu, rec.min_raw_nu);
        out.nu_clamps += rec.nu_clamps;
        out.positivity_clips += rec.positivity_clips;
        jump_counts[i] = rec.jump_times.size();
        if (keep) result.trajectories[i] = std::move(rec);
      } catch (const TrajectoryAborted& e) {
        out.aborts.push_back({i, e.step(), e.time(), e.what()});
      }
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
      });
    }
  }

  Moments total;
  total.init(observables.size(), n_points);
  EnsembleSummary& s = result.summary;
  for (auto& blk : blocks) {
    total.merge(blk.moments);
    s.max_defects.trace = std::max(s.max_defects.trace, blk.defects.trace);
    s.max_defects.hermiticity = std::max(s.max_defects.hermiticity, blk.defects.hermiticity);
    s.max_defects.coherence = std::max(s.max_defects.coherence, blk.defects.coherence);
    s.warnings += blk.warnings;
    s.min_raw_nu = std::min(s.min_raw_nu, blk.min_raw_nu);
    s.nu_clamps += blk.nu_clamps;
    s.positivity_clips += blk.positivity_clips;
    result.aborts.insert(result.aborts.end(), blk.aborts.begin(), blk.aborts.end());
  }
  for (const auto& a : result.aborts) result.aborted[a.trajectory_index] = true;

  s.n_requested = m;
  s.n_aborted = result.aborts.size();
  s.n_traj = m - s.n_aborted;
  if (static_cast<double>(s.n_aborted) > options.max_abort_fraction * static_cast<double>(m) || s.n_traj == 0) {
    std::string msg = std::to_string(s.n_aborted) + " of " + std::to_string(m) + " trajectories aborted";
    if (!result.aborts.empty()) {
      msg += "; first: trajectory " + std::to_string(result.aborts.front().trajectory_index) + ": " +
             result.aborts.front().message;
    }
    throw EnsembleFailed(msg, result.aborts);
  }

  s.times.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) s.times.push_back(grid.time(k));
  for (const auto& o : observables) s.names.push_back(o.name);
  const double count = static_cast<double>(total.count);
  for (std::size_t o = 0; o < observables.size(); ++o) {
    CurveStats cs;
    cs.mean = total.mean[o];
    cs.stderr_.resize(n_points, 0.0);
    if (total.count > 1) {
      for (std::size_t k = 0; k < n_points; ++k) {
        const double var = std::max(total.m2[o][k], 0.0) / (count - 1.0);
        cs.stderr_[k] = std::sqrt(var / count);
      }
    }
    s.stats.push_back(std::move(cs));
  }

  // Click statistics over successful trajectories, in index order.
  double sum = 0.0;
  double sum_sq = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (result.aborted[i]) continue;
    const std::size_t c = jump_counts[i];
    s.jumps.total += c;
    s.jumps.min = first ? c : std::min(s.jumps.min, c);
    s.jumps.max = first ? c : std::max(s.jumps.max, c);
    first = false;
    sum += static_cast<double>(c);
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  s.jumps.mean = sum / count;
  if (total.count > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1.0));
    s.jumps.stderr_ = std::sqrt(var / count);
  }

  if (options.attach_master) s.master = solve_master(ctx, initial, grid, observables);
  return result;
}

}  // namespace qfilter
