#include "halfparity/sde_engine.hpp"

#include "halfparity/error.hpp"
#include "halfparity/trajectory_analysis.hpp"
#include "integrator.hpp"

#include <cmath>
#include <limits>

namespace halfparity {

void SimulationConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (gamma * dt > 0.01 * (1.0 + 1e-12))
    throw DomainError("weak-measurement guard violated: gamma * dt must be <= 0.01");
  if (!(t_max >= dt) || !std::isfinite(t_max)) throw DomainError("t_max must be >= dt");
  if (!(eta > 0.0) || eta > 1.0) throw DomainError("eta must lie in (0, 1]");
  if (n_traj == 0) throw DomainError("n_traj must be positive");
  if (record_stride == 0) throw DomainError("record_stride must be positive");
}

std::size_t SimulationConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(t_max / dt));
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
  // splitmix64 finalizer applied to a Weyl-sequence offset of the master seed
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master_seed) + 0x9E3779B97F4A7C15ULL * (trajectory_index + 1));
}

WienerSource::WienerSource(std::uint64_t master_seed, std::uint64_t trajectory_index, double dt)
    : engine_(substream_seed(master_seed, trajectory_index)), normal_(0.0, std::sqrt(dt)) {}

double WienerSource::next() { return normal_(engine_); }

PureStepResult sse_step(const PureState& psi, double dW, const SimulationConfig& cfg) {
  if (cfg.mixed()) throw DomainError("sse_step requires eta == 1");
  const Eigen::Vector4d phi = phi_diagonal();
  const double mean = phi_expectation(psi);
  const double sqrt_gamma = std::sqrt(cfg.gamma);
  const Eigen::Vector4d shifted = phi.array() - mean;

  // H commutes with Phi, so its exact phase is applied on top of the Euler
  // measurement update.
  Amplitudes factor;
  for (int i = 0; i < 4; ++i) {
    const double kick = 1.0 - 0.5 * cfg.gamma * shifted[i] * shifted[i] * cfg.dt + sqrt_gamma * dW * shifted[i];
    factor[i] = kick * std::polar(1.0, -cfg.epsilon * phi[i] * cfg.dt);
  }
  Amplitudes next = factor.cwiseProduct(psi.amplitudes());
  const double norm = next.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 0.5)
    throw StepFailure("SSE step diverged: pre-renormalization norm " + std::to_string(norm));
  next /= norm;
  return {PureState(next), mean + dW / (2.0 * sqrt_gamma * cfg.dt), norm};
}

MixedStepResult sme_step(const DensityMatrix& rho, double dW, const SimulationConfig& cfg) {
  const Eigen::Vector4d phi = phi_diagonal();
  const double mean = phi_expectation(rho);
  const double kick = std::sqrt(cfg.eta * cfg.gamma);
  const Eigen::Vector4d shifted = phi.array() - mean;

  Amplitudes k;
  for (int i = 0; i < 4; ++i) {
    const double m = 1.0 - 0.5 * cfg.gamma * shifted[i] * shifted[i] * cfg.dt + kick * dW * shifted[i];
    k[i] = m * std::polar(1.0, -cfg.epsilon * phi[i] * cfg.dt);
  }
  const double lost = (1.0 - cfg.eta) * cfg.gamma * cfg.dt;
  const Matrix4c& r = rho.matrix();
  Matrix4c next;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      next(i, j) = k[i] * r(i, j) * std::conj(k[j]) + lost * shifted[i] * shifted[j] * r(i, j);
  next = 0.5 * (next + next.adjoint()).eval();

  const double tr = next.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw StepFailure("SME step produced a non-positive trace");
  next /= tr;

  // Cholesky of rho + 1e-6 succeeds iff the smallest eigenvalue exceeds -1e-6.
  Eigen::LLT<Matrix4c> guard(next + 1e-6 * Matrix4c::Identity());
  if (guard.info() != Eigen::Success) {
    DensityMatrix candidate(next);
    const double lowest = candidate.min_eigenvalue();
    if (lowest < -1e-6)
      throw StepFailure("SME step lost positivity: min eigenvalue " + std::to_string(lowest));
  }
  return {DensityMatrix(next), mean + dW / (2.0 * kick * cfg.dt)};
}

namespace {

class RecordSink {
 public:
  RecordSink(const SimulationConfig& cfg, std::size_t index) : cfg_(cfg), n_(cfg.n_steps()) {
    record_.index = index;
    record_.dt = cfg.dt;
    record_.eta = cfg.eta;
    record_.stride = cfg.record_stride;
    const std::size_t rows = n_ / cfg.record_stride + 2;
    record_.samples.reserve(rows);
    if (cfg.mixed())
      record_.mixed_states.reserve(rows);
    else
      record_.pure_states.reserve(rows);
  }

  template <class State>
  void begin(const State& state, const Populations& pops) {
    TrajectorySample s;
    s.outcome = std::numeric_limits<double>::quiet_NaN();
    s.populations = pops;
    s.energy = cfg_.epsilon * pops.phi();
    store(s, state);
  }

  template <class State>
  void step(const detail::StepView& v, const State& state) {
    const HeatIncrement h = heat_increment(v.before, v.after, v.dW, cfg_);
    heat_ += h.total;
    if (v.step % cfg_.record_stride != 0 && v.step != n_) return;
    TrajectorySample s;
    s.t = v.t;
    s.record = v.record;
    s.outcome = v.outcome;
    s.energy = cfg_.epsilon * v.after.phi();
    s.heat = heat_;
    s.heat_increment = h.total;
    s.heat_even = h.even;
    s.heat_even_odd = h.even_odd;
    s.wiener = v.dW;
    s.populations = v.after;
    store(s, state);
  }

  TrajectoryRecord take() { return std::move(record_); }

 private:
  void store(TrajectorySample& s, const PureState& psi) {
    s.concurrence = concurrence_pure(psi);
    record_.samples.push_back(s);
    record_.pure_states.push_back(psi);
  }
  void store(TrajectorySample& s, const DensityMatrix& rho) {
    s.concurrence = concurrence_wootters(rho);
    record_.samples.push_back(s);
    record_.mixed_states.push_back(rho);
  }

  const SimulationConfig& cfg_;
  std::size_t n_;
  double heat_ = 0.0;
  TrajectoryRecord record_;
};

}  // namespace

TrajectoryRecord run_trajectory(const SimulationConfig& cfg, std::size_t traj_index) {
  return run_trajectory_from(cfg, traj_index, PureState::initial());
}

TrajectoryRecord run_trajectory_from(const SimulationConfig& cfg, std::size_t traj_index,
                                     const PureState& start) {
  cfg.validate();
  RecordSink sink(cfg, traj_index);
  detail::integrate(cfg, traj_index, start, sink);
  return sink.take();
}

double integrated_outcome(const TrajectoryRecord& record, double t) {
  if (record.samples.size() < 2) throw DomainError("record has no steps");
  const double dt = record.dt;
  if (!(t >= dt * (1.0 - 1e-9))) throw DomainError("J is undefined before the first step");
  const auto k = static_cast<std::size_t>(std::llround(t / dt));
  if (std::abs(static_cast<double>(k) * dt - t) > 1e-9 * std::max(1.0, t))
    throw DomainError("t is not aligned to the step grid");

  if (record.stride == 1) {
    if (k >= record.samples.size()) throw DomainError("t beyond the end of the record");
    double integral = 0.0;
    for (std::size_t j = 1; j <= k; ++j) integral += record.samples[j].record * dt;
    return integral / (static_cast<double>(k) * dt);
  }
  for (const auto& s : record.samples)
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, t)) return s.outcome;
  throw DomainError("t is not a stored row of the subsampled record");
}

}  // namespace halfparity
