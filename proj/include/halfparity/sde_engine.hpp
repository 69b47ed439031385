#pragma once

// Stochastic integration of single trajectories.
//
// eta = 1 integrates the stochastic Schroedinger equation for |psi>, eta < 1
// the stochastic master equation for rho. Both use the Ito convention: the
// record sample and the heat increment of a step use the pre-step state.

#include "halfparity/quantum_core.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace halfparity {

struct SimulationConfig {
  double gamma = 1.0;
  double epsilon = 1.0;
  double dt = 1e-3;
  double t_max = 10.0;
  double eta = 1.0;
  std::size_t n_traj = 800;
  std::uint64_t master_seed = 20190725;
  std::size_t record_stride = 1;

  /// Throws DomainError on a violated invariant (notably Gamma dt > 0.01).
  void validate() const;
  std::size_t n_steps() const;
  bool mixed() const { return eta < 1.0; }

  bool operator==(const SimulationConfig&) const = default;
};

/// Seed of the generator substream owned by one trajectory. Depends only on
/// (master_seed, trajectory index), never on scheduling.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Wiener increments dW ~ Normal(0, dt) for one trajectory.
class WienerSource {
 public:
  WienerSource(std::uint64_t master_seed, std::uint64_t trajectory_index, double dt);

  double next();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

struct PureStepResult {
  PureState state;
  double record = 0.0;       // I = <Phi> + dW / (2 sqrt(Gamma) dt)
  double norm_before = 1.0;  // norm of the Euler update before renormalization
};

/// One Euler-Maruyama step of
///   d|psi> = [-i H dt - Gamma/2 (Phi - <Phi>)^2 dt + sqrt(Gamma) dW (Phi - <Phi>)] |psi>
/// followed by renormalization. The -i H dt term enters as the exact phase
/// e^{-i H dt} (H and Phi commute), which keeps populations independent of epsilon. Throws StepFailure if the pre-renormalization
/// norm is off by more than 0.5.
PureStepResult sse_step(const PureState& psi, double dW, const SimulationConfig& cfg);

struct MixedStepResult {
  DensityMatrix rho;
  double record = 0.0;  // I = <Phi> + dW / (2 sqrt(eta Gamma) dt)
};

/// One step of the finite-efficiency master equation
///   drho = -i[H, rho] dt + Gamma D[Phi] rho dt + sqrt(eta Gamma) dW ({Phi, rho} - 2 <Phi> rho)
/// written in completely positive form:
///   rho' = (K rho K^+ + (1 - eta) Gamma dt B rho B) / trace,
///   K = e^{-i H dt} (1 - Gamma/2 B^2 dt + sqrt(eta Gamma) dW B),  B = Phi - <Phi>.
/// At eta = 1 this is exactly the projector of sse_step. Throws StepFailure if
/// the minimum eigenvalue drops below -1e-6.
MixedStepResult sme_step(const DensityMatrix& rho, double dW, const SimulationConfig& cfg);

/// One stored row of a trajectory. Row k sits at t_k = k dt; the step fields
/// (record, wiener, heat increments) describe the step that ends at t_k and are
/// zero on row 0.
struct TrajectorySample {
  double t = 0.0;
  double record = 0.0;   // I_k
  double outcome = 0.0;  // J_k = (1/t_k) sum_{j<=k} I_j dt; NaN on row 0
  double concurrence = 0.0;
  double energy = 0.0;          // U_k = epsilon <Phi>(t_k)
  double heat = 0.0;            // Q_k = sum_{j<=k} dQ_j
  double heat_increment = 0.0;  // dQ_k
  double heat_even = 0.0;       // dQ^(e)_k
  double heat_even_odd = 0.0;   // dQ^(eo)_k
  double wiener = 0.0;          // dW_k
  Populations populations;      // at t_k
};

struct TrajectoryRecord {
  std::size_t index = 0;
  double dt = 0.0;
  double eta = 1.0;
  std::size_t stride = 1;
  std::vector<TrajectorySample> samples;
  std::vector<PureState> pure_states;       // filled when eta == 1
  std::vector<DensityMatrix> mixed_states;  // filled when eta < 1

  bool mixed() const { return eta < 1.0; }
  const TrajectorySample& final_sample() const { return samples.back(); }
};

/// Integrates from the initial product state to t_max. Rows are stored every
/// record_stride steps plus the final step. Deterministic in
/// (cfg, traj_index). Throws IntegrationError carrying the failing step.
TrajectoryRecord run_trajectory(const SimulationConfig& cfg, std::size_t traj_index);

/// Same trajectory started from an arbitrary pure state (eta == 1 only).
TrajectoryRecord run_trajectory_from(const SimulationConfig& cfg, std::size_t traj_index,
                                     const PureState& start);

/// J(t) = (1/t) sum I_k dt over steps ending at or before t. Recomputed from
/// the record samples when stride == 1, read from the aligned row otherwise.
/// Throws DomainError for t before the first step or off the stored grid.
double integrated_outcome(const TrajectoryRecord& record, double t);

}  // namespace halfparity
