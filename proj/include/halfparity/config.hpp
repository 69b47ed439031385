#pragma once

// Flat key = value run configuration shared by the CLI subcommands.
//
//   # comment
//   gamma = 1
//   taus = 0.1, 0.4, delta_t
//   t_i = 0:10:26          (start:stop:count, or a comma list)
//
// Keys are the field names of SimulationConfig plus the estimator-grid and
// output keys below. Unknown keys and malformed values throw DomainError.

#include "halfparity/estimator.hpp"
#include "halfparity/sde_engine.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace halfparity {

enum class TrajectoryFiles { Concatenated, PerTrajectory, None };

struct RunConfig {
  SimulationConfig sim;

  // estimator-grid
  std::vector<TauSpec> taus{TauSpec::fixed(0.1), TauSpec::fixed(0.4), TauSpec::window()};
  std::vector<double> etas;  // empty: use sim.eta
  GridAxes axes = GridAxes::default_axes();
  double concurrence_threshold = 0.8;
  FluctuationUnits units = FluctuationUnits::Energy;

  // simulate
  TrajectoryFiles trajectory_files = TrajectoryFiles::Concatenated;

  std::size_t n_workers = 0;  // 0: all available

  /// Efficiencies the grid runs over.
  std::vector<double> grid_etas() const { return etas.empty() ? std::vector<double>{sim.eta} : etas; }
  /// Horizon long enough for every grid window: max(t_max, max t_i + max delta_t).
  double grid_t_max() const;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

/// Applies one key = value assignment (same syntax as the file format).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

std::string_view to_string(TrajectoryFiles mode);
std::string_view to_string(FluctuationUnits units);

}  // namespace halfparity
