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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfilter/errors.hpp"
#include "qfilter/integrator.hpp"

namespace qfilter {

/// Tr[rho11 |e><e|] clamped to [0, 1]. |e> is basis index `excited_index`
/// (0 by the project convention).
double excitation_probability(const Operator& rho11, std::size_t excited_index = 0);
/// The unclamped value.
double excitation_probability_raw(const Operator& rho11, std::size_t excited_index = 0);

struct EnsembleOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: one per hardware thread
  /// Keep every TrajectoryRecord. Forced off above kMaxStoredTrajectories,
  /// where only the streaming statistics are produced.
  bool keep_trajectories = true;
  bool attach_master = true;
  double max_abort_fraction = 0.01;
  TrajectoryOptions trajectory{.hygiene = true, .record_measurements = false};

  static constexpr std::size_t kMaxStoredTrajectories = 10000;
};

struct CurveStats {
  std::vector<double> mean;
  std::vector<double> stderr_;  // sample std / sqrt(M)
};

struct JumpStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t total = 0;
};

struct AbortInfo {
  std::size_t trajectory_index = 0;
  std::size_t step = 0;
  double time = 0.0;
  std::string message;
};

struct EnsembleSummary {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<CurveStats> stats;        // per observable, over successful trajectories
  std::optional<MasterCurve> master;
  std::size_t n_requested = 0;
  std::size_t n_traj = 0;               // successful
  std::size_t n_aborted = 0;
  JumpStats jumps;
  HierarchyDefects max_defects;         // worst over all successful trajectories
  std::size_t warnings = 0;
  double min_raw_nu = 0.0;              // HdPc: lowest unclamped click intensity seen
  std::size_t nu_clamps = 0;            // HdPc: steps where it was clamped up to 0
  std::size_t positivity_clips = 0;     // steps where hygiene clipped an eigenvalue

  const CurveStats& stats_for(const std::string& name) const;
  /// max_t |mean - master| for the named observable. Requires the master curve.
  double max_master_deviation(const std::string& name) const;
};

struct EnsembleResult {
  EnsembleSummary summary;
  /// Index-aligned with the noise stream index; empty when not kept.
  /// Aborted slots hold an empty record.
  std::vector<TrajectoryRecord> trajectories;
  std::vector<bool> aborted;
  std::vector<AbortInfo> aborts;
};

/// Raised when more than max_abort_fraction of the trajectories abort.
class EnsembleFailed : public InvariantViolation {
 public:
  EnsembleFailed(const std::string& what, std::vector<AbortInfo> aborts)
      : InvariantViolation(what), aborts_(std::move(aborts)) {}
  const std::vector<AbortInfo>& aborts() const { return aborts_; }

 private:
  std::vector<AbortInfo> aborts_;
};

/// Runs trajectories 0..n_traj-1 (noise stream index = trajectory index) on
/// a worker pool. Statistics are accumulated per fixed block of indices and
/// merged in index order, so every number is independent of thread count.
EnsembleResult run_ensemble(const FilterContext& ctx, const HierarchyState& initial, const TimeGrid& grid,
                            std::span<const Observable> observables, const EnsembleOptions& options);

}  // namespace qfilter
