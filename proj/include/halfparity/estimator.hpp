#pragma once

// Trajectory-based entanglement witness and the single-shot energetic
// estimator, plus success/error-rate maps over (t_i, delta_t) grids.

#include "halfparity/sde_engine.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace halfparity {

/// How the per-step heat increments enter the coarse-grained fluctuation term.
///   Energy: rms of dQ/epsilon over the window (default).
///   Sigma:  rms of dQ/(2 epsilon sqrt(Gamma dt)), the sigma~-normalized increment.
enum class FluctuationUnits { Energy, Sigma };

struct EstimatorConfig {
  double t_i = 3.0;
  double delta_t = 0.3;
  double tau = 0.3;
  double concurrence_threshold = 0.8;
  double eta = 1.0;
  FluctuationUnits units = FluctuationUnits::Energy;

  /// Throws DomainError unless t_i >= 0, delta_t > 0, tau >= dt,
  /// t_i + delta_t <= t_max and the threshold lies in (0, 1].
  void validate(double dt, double t_max) const;
};

/// What the estimator needs from one trajectory.
struct EstimatorTrace {
  std::size_t index = 0;
  double dt = 0.0;
  double gamma = 1.0;
  std::vector<double> heat;       // Q~_k = (U_k - U_0)/epsilon, n + 1 rows
  std::vector<double> increment;  // dQ_k/epsilon for the step [t_k, t_k+1], n entries
  double final_concurrence = 0.0;

  std::size_t n_steps() const { return increment.size(); }
};

/// Extracts a trace from a full record (stride 1 only).
EstimatorTrace make_trace(const TrajectoryRecord& record, const SimulationConfig& cfg);

/// Integrates one trajectory keeping only the estimator trace. Same noise and
/// states as run_trajectory(cfg, traj_index).
EstimatorTrace run_estimator_trace(const SimulationConfig& cfg, std::size_t traj_index);

/// W = (1/m) sum_{k=k0}^{k0+m-1} [2 Q~_k^2 - sigma~(J_k, t_k)], k0 = t_i/dt, m = delta_t/dt.
/// eta = 1 only. J at t = 0 is taken as 0.
double witness(const TrajectoryRecord& record, double t_i, double delta_t, const SimulationConfig& cfg);

/// E_ss = (1/m) sum_{k=k0}^{k0+m-1} [2 Q~_k^2 - F_k], F_k the rms increment over
/// steps [k, k + tau/dt) cut at the end of the trace.
double estimator_ss(const EstimatorTrace& trace, const EstimatorConfig& est);
double estimator_ss(const TrajectoryRecord& record, const EstimatorConfig& est, const SimulationConfig& cfg);

struct GridAxes {
  std::vector<double> t_i;
  std::vector<double> delta_t;

  /// t_i = 0, 0.4, ..., 10 and delta_t = 0.4, 0.8, ..., 10 (in units of 1/Gamma).
  static GridAxes default_axes(double gamma = 1.0);
  /// n evenly spaced values from a to b inclusive.
  static std::vector<double> linspace(double a, double b, std::size_t n);

  bool operator==(const GridAxes&) const = default;
};

/// Coarse-graining time: a fixed value, or equal to delta_t cell by cell.
struct TauSpec {
  double value = 0.1;
  bool tracks_window = false;

  static TauSpec fixed(double tau) { return {tau, false}; }
  static TauSpec window() { return {0.0, true}; }
  double at(double delta_t) const { return tracks_window ? delta_t : value; }
  /// "0.1", "0.4", ... or "delta_t".
  std::string label() const;

  bool operator==(const TauSpec&) const = default;
};

struct RateCell {
  double t_i = 0.0;
  double delta_t = 0.0;
  double tau = 0.0;
  double success_rate = 0.0;  // NaN when no entangled trajectory
  double error_rate = 0.0;    // NaN when no separable trajectory
  std::size_t n_entangled = 0;
  std::size_t n_separable = 0;
};

struct RateGrid {
  GridAxes axes;
  TauSpec tau;
  double eta = 1.0;
  std::vector<RateCell> cells;  // t_i major, delta_t minor

  const RateCell& at(std::size_t i, std::size_t j) const { return cells[i * axes.delta_t.size() + j]; }
  double max_error_rate() const;
};

/// Evaluates E_ss on every cell for every trace. Entangled means final
/// concurrence >= threshold. Cells whose window does not fit the traces throw.
RateGrid rate_grid(std::span<const EstimatorTrace> ensemble, const GridAxes& axes, TauSpec tau,
                   double concurrence_threshold = 0.8, double eta = 1.0,
                   FluctuationUnits units = FluctuationUnits::Energy);

/// Smallest t_i with a cell reaching success_rate >= level, if any.
std::optional<double> min_crossing_t_i(const RateGrid& grid, double level = 0.5);

}  // namespace halfparity
