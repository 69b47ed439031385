#include "halfparity/ensemble.hpp"

#include "halfparity/error.hpp"

#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace halfparity {

std::size_t resolve_workers(std::size_t requested) {
#ifdef _OPENMP
  if (requested == 0) return static_cast<std::size_t>(omp_get_max_threads());
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

namespace {

template <class T, class Fn>
std::vector<T> fan_out(std::size_t first, std::size_t count, std::size_t n_workers, Fn run) {
  std::vector<T> out(count);
  std::exception_ptr failure;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  const auto total = static_cast<long long>(count);
  [[maybe_unused]] const int threads = static_cast<int>(resolve_workers(n_workers));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < total; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run(first + k);
    } catch (...) {
#pragma omp critical(halfparity_failure)
      if (first + k < failed_at) {
        failed_at = first + k;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

std::vector<TrajectoryRecord> run_ensemble(const SimulationConfig& cfg, std::size_t first, std::size_t count,
                                           std::size_t n_workers) {
  cfg.validate();
  return fan_out<TrajectoryRecord>(first, count, n_workers,
                                   [&](std::size_t k) { return run_trajectory(cfg, k); });
}

std::vector<TrajectoryRecord> run_ensemble(const SimulationConfig& cfg, std::size_t n_workers) {
  return run_ensemble(cfg, 0, cfg.n_traj, n_workers);
}

std::vector<EstimatorTrace> run_estimator_ensemble(const SimulationConfig& cfg, std::size_t n_workers) {
  cfg.validate();
  return fan_out<EstimatorTrace>(0, cfg.n_traj, n_workers,
                                 [&](std::size_t k) { return run_estimator_trace(cfg, k); });
}

}  // namespace halfparity
