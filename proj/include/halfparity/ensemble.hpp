#pragma once

// Parallel ensemble drivers. Trajectory k always uses noise substream k, and
// results come back ordered by index, so output does not depend on the number
// of workers.

#include "halfparity/estimator.hpp"
#include "halfparity/sde_engine.hpp"

#include <cstddef>
#include <vector>

namespace halfparity {

/// Worker count actually used for a request; 0 means the OpenMP default.
std::size_t resolve_workers(std::size_t requested);

/// Trajectories [first, first + count). On failure rethrows the
/// IntegrationError of the lowest failing index.
std::vector<TrajectoryRecord> run_ensemble(const SimulationConfig& cfg, std::size_t first, std::size_t count,
                                           std::size_t n_workers = 0);

/// All cfg.n_traj trajectories.
std::vector<TrajectoryRecord> run_ensemble(const SimulationConfig& cfg, std::size_t n_workers = 0);

/// Estimator traces for all cfg.n_traj trajectories.
std::vector<EstimatorTrace> run_estimator_ensemble(const SimulationConfig& cfg, std::size_t n_workers = 0);

}  // namespace halfparity
