#pragma once

// Shared stepping loop behind run_trajectory and the estimator traces. A sink
// receives the initial state and then every step; it decides what to keep.

#include "halfparity/error.hpp"
#include "halfparity/sde_engine.hpp"

#include <cstddef>
#include <type_traits>

namespace halfparity::detail {

struct StepView {
  std::size_t step = 0;  // k, the step ends at t_k = k dt
  double t = 0.0;
  double dW = 0.0;
  double record = 0.0;
  double outcome = 0.0;
  const Populations& before;
  const Populations& after;
};

template <class Sink>
void integrate(const SimulationConfig& cfg, std::size_t traj_index, const PureState& start, Sink& sink) {
  WienerSource noise(cfg.master_seed, traj_index, cfg.dt);
  const std::size_t n = cfg.n_steps();
  double record_integral = 0.0;

  auto advance = [&](auto state) {
    Populations pops = populations(state);
    sink.begin(state, pops);
    for (std::size_t k = 1; k <= n; ++k) {
      const double dW = noise.next();
      double record = 0.0;
      try {
        if constexpr (std::is_same_v<decltype(state), PureState>) {
          auto r = sse_step(state, dW, cfg);
          state = r.state;
          record = r.record;
        } else {
          auto r = sme_step(state, dW, cfg);
          state = r.rho;
          record = r.record;
        }
      } catch (const StepFailure& e) {
        throw IntegrationError(e.what(), traj_index, k);
      }
      record_integral += record * cfg.dt;
      const double t = static_cast<double>(k) * cfg.dt;
      const Populations after = populations(state);
      sink.step(StepView{k, t, dW, record, record_integral / t, pops, after}, state);
      pops = after;
    }
  };

  if (cfg.mixed())
    advance(DensityMatrix::from_pure(start));
  else
    advance(start);
}

}  // namespace halfparity::detail
