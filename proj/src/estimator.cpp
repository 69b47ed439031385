#include "halfparity/estimator.hpp"

#include "halfparity/analytic.hpp"
#include "halfparity/error.hpp"
#include "halfparity/trajectory_analysis.hpp"
#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace halfparity {

void EstimatorConfig::validate(double dt, double t_max) const {
  if (!(t_i >= 0.0)) throw DomainError("t_i must be >= 0");
  if (!(delta_t > 0.0)) throw DomainError("delta_t must be positive");
  if (!(tau >= dt * (1.0 - 1e-9))) throw DomainError("tau must be >= dt");
  if (t_i + delta_t > t_max * (1.0 + 1e-9)) throw DomainError("window [t_i, t_i + delta_t] exceeds t_max");
  if (!(concurrence_threshold > 0.0) || concurrence_threshold > 1.0)
    throw DomainError("concurrence threshold must lie in (0, 1]");
  if (!(eta > 0.0) || eta > 1.0) throw DomainError("eta must lie in (0, 1]");
}

namespace {

std::size_t steps_of(double span, double dt) {
  return static_cast<std::size_t>(std::llround(span / dt));
}

std::size_t window_steps(double span, double dt) { return std::max<std::size_t>(1, steps_of(span, dt)); }

double units_scale(FluctuationUnits units, double gamma, double dt) {
  return units == FluctuationUnits::Energy ? 1.0 : 1.0 / (2.0 * std::sqrt(gamma * dt));
}

// Tail sums of the squared increments, tail[n] = 0. Tail rather than prefix
// sums keep full precision late in a trajectory where the increments are tiny.
std::vector<double> squared_tail(const std::vector<double>& increment) {
  std::vector<double> tail(increment.size() + 1, 0.0);
  for (std::size_t k = increment.size(); k-- > 0;) tail[k] = tail[k + 1] + increment[k] * increment[k];
  return tail;
}

// Integrand 2 Q~_k^2 - F_k for k in [0, end).
void integrand(const EstimatorTrace& trace, const std::vector<double>& tail, std::size_t width, double scale,
               std::size_t end, std::vector<double>& out) {
  const std::size_t n = trace.n_steps();
  out.resize(end);
  for (std::size_t k = 0; k < end; ++k) {
    const std::size_t hi = std::min(n, k + width);
    const double mean_sq = std::max(0.0, tail[k] - tail[hi]) / static_cast<double>(hi - k);
    out[k] = 2.0 * trace.heat[k] * trace.heat[k] - scale * std::sqrt(mean_sq);
  }
}

class TraceSink {
 public:
  TraceSink(const SimulationConfig& cfg, std::size_t index) : cfg_(cfg), n_(cfg.n_steps()) {
    trace_.index = index;
    trace_.dt = cfg.dt;
    trace_.gamma = cfg.gamma;
    trace_.heat.reserve(n_ + 1);
    trace_.increment.reserve(n_);
  }

  template <class State>
  void begin(const State&, const Populations& pops) {
    phi0_ = pops.phi();
    trace_.heat.push_back(0.0);
  }

  template <class State>
  void step(const detail::StepView& v, const State& state) {
    const HeatIncrement h = heat_increment(v.before, v.after, v.dW, cfg_);
    trace_.increment.push_back(h.total / cfg_.epsilon);
    trace_.heat.push_back(v.after.phi() - phi0_);
    if (v.step == n_) {
      if constexpr (std::is_same_v<State, PureState>)
        trace_.final_concurrence = concurrence_pure(state);
      else
        trace_.final_concurrence = concurrence_wootters(state);
    }
  }

  EstimatorTrace take() { return std::move(trace_); }

 private:
  const SimulationConfig& cfg_;
  std::size_t n_;
  double phi0_ = 0.0;
  EstimatorTrace trace_;
};

}  // namespace

EstimatorTrace make_trace(const TrajectoryRecord& record, const SimulationConfig& cfg) {
  const HeatSeries series = heat_increments(record, cfg);
  EstimatorTrace trace;
  trace.index = record.index;
  trace.dt = record.dt;
  trace.gamma = cfg.gamma;
  const double u0 = record.samples.front().energy;
  trace.heat.reserve(record.samples.size());
  for (const auto& s : record.samples) trace.heat.push_back((s.energy - u0) / cfg.epsilon);
  trace.increment.reserve(series.n_steps());
  for (double dq : series.increment) trace.increment.push_back(dq / cfg.epsilon);
  trace.final_concurrence = record.final_sample().concurrence;
  return trace;
}

EstimatorTrace run_estimator_trace(const SimulationConfig& cfg, std::size_t traj_index) {
  cfg.validate();
  TraceSink sink(cfg, traj_index);
  detail::integrate(cfg, traj_index, PureState::initial(), sink);
  return sink.take();
}

double witness(const TrajectoryRecord& record, double t_i, double delta_t, const SimulationConfig& cfg) {
  if (record.mixed() || cfg.mixed()) throw DomainError("the witness needs the eta = 1 closed form");
  if (record.stride != 1) throw DomainError("the witness needs every step (stride 1)");
  if (!(t_i >= 0.0) || !(delta_t > 0.0)) throw DomainError("window needs t_i >= 0 and delta_t > 0");
  const std::size_t n = record.samples.size() - 1;
  const std::size_t k0 = steps_of(t_i, record.dt);
  const std::size_t m = window_steps(delta_t, record.dt);
  if (k0 + m > n) throw DomainError("witness window exceeds the record");

  const double u0 = record.samples.front().energy;
  double sum = 0.0;
  for (std::size_t k = k0; k < k0 + m; ++k) {
    const auto& s = record.samples[k];
    const double q = (s.energy - u0) / cfg.epsilon;
    const double J = k == 0 ? 0.0 : s.outcome;
    sum += 2.0 * q * q - sigma_tilde({J, s.t, cfg.gamma, cfg.epsilon});
  }
  return sum / static_cast<double>(m);
}

double estimator_ss(const EstimatorTrace& trace, const EstimatorConfig& est) {
  const std::size_t n = trace.n_steps();
  est.validate(trace.dt, static_cast<double>(n) * trace.dt);
  const std::size_t k0 = steps_of(est.t_i, trace.dt);
  const std::size_t m = window_steps(est.delta_t, trace.dt);
  if (k0 + m > n) throw DomainError("estimator window exceeds the trace");
  const std::size_t width = window_steps(est.tau, trace.dt);
  const std::vector<double> tail = squared_tail(trace.increment);
  std::vector<double> f;
  integrand(trace, tail, width, units_scale(est.units, trace.gamma, trace.dt), k0 + m, f);
  double sum = 0.0;
  for (std::size_t k = k0; k < k0 + m; ++k) sum += f[k];
  return sum / static_cast<double>(m);
}

double estimator_ss(const TrajectoryRecord& record, const EstimatorConfig& est, const SimulationConfig& cfg) {
  return estimator_ss(make_trace(record, cfg), est);
}

std::vector<double> GridAxes::linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

GridAxes GridAxes::default_axes(double gamma) {
  return {linspace(0.0, 10.0 / gamma, 26), linspace(0.4 / gamma, 10.0 / gamma, 25)};
}

std::string TauSpec::label() const {
  if (tracks_window) return "delta_t";
  std::string s = std::to_string(value);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

double RateGrid::max_error_rate() const {
  double worst = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : cells)
    if (!std::isnan(c.error_rate) && !(c.error_rate <= worst)) worst = c.error_rate;
  return worst;
}

RateGrid rate_grid(std::span<const EstimatorTrace> ensemble, const GridAxes& axes, TauSpec tau,
                   double concurrence_threshold, double eta, FluctuationUnits units) {
  if (ensemble.empty()) throw DomainError("rate grid needs a non-empty ensemble");
  if (axes.t_i.empty() || axes.delta_t.empty()) throw DomainError("rate grid axes must be non-empty");
  if (!(concurrence_threshold > 0.0) || concurrence_threshold > 1.0)
    throw DomainError("concurrence threshold must lie in (0, 1]");
  const double dt = ensemble.front().dt;
  const double gamma = ensemble.front().gamma;
  std::size_t n = ensemble.front().n_steps();
  for (const auto& tr : ensemble) {
    if (tr.dt != dt || tr.n_steps() != n) throw DomainError("ensemble traces must share dt and length");
    n = tr.n_steps();
  }

  const std::size_t ni = axes.t_i.size();
  const std::size_t nd = axes.delta_t.size();
  std::vector<std::size_t> k0(ni), m(nd);
  std::size_t end = 0;
  for (std::size_t i = 0; i < ni; ++i) k0[i] = steps_of(axes.t_i[i], dt);
  for (std::size_t j = 0; j < nd; ++j) m[j] = window_steps(axes.delta_t[j], dt);
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t j = 0; j < nd; ++j) {
      EstimatorConfig est{axes.t_i[i], axes.delta_t[j], tau.at(axes.delta_t[j]), concurrence_threshold, eta, units};
      est.validate(dt, static_cast<double>(n) * dt);
      end = std::max(end, k0[i] + m[j]);
    }
  if (end > n) throw DomainError("grid windows exceed the trajectory length");

  // Delta_t columns grouped by coarse-graining width so each trace's
  // integrand is built once per distinct width.
  std::map<std::size_t, std::vector<std::size_t>> by_width;
  for (std::size_t j = 0; j < nd; ++j) by_width[window_steps(tau.at(axes.delta_t[j]), dt)].push_back(j);
  const double scale = units_scale(units, gamma, dt);

  const std::size_t n_cells = ni * nd;
  std::vector<std::size_t> neg_entangled(n_cells, 0), neg_separable(n_cells, 0);
  std::size_t n_entangled = 0;
  for (const auto& tr : ensemble) n_entangled += tr.final_concurrence >= concurrence_threshold ? 1 : 0;

  const auto count = static_cast<long long>(ensemble.size());
#pragma omp parallel
  {
    std::vector<std::size_t> local_e(n_cells, 0), local_s(n_cells, 0);
    std::vector<double> f, suffix;
#pragma omp for schedule(dynamic, 4)
    for (long long t = 0; t < count; ++t) {
      const EstimatorTrace& tr = ensemble[static_cast<std::size_t>(t)];
      const bool entangled = tr.final_concurrence >= concurrence_threshold;
      auto& hits = entangled ? local_e : local_s;
      const std::vector<double> tail = squared_tail(tr.increment);
      for (const auto& [width, columns] : by_width) {
        integrand(tr, tail, width, scale, end, f);
        suffix.assign(end + 1, 0.0);
        for (std::size_t k = end; k-- > 0;) suffix[k] = suffix[k + 1] + f[k];
        for (std::size_t i = 0; i < ni; ++i)
          for (std::size_t j : columns)
            if (suffix[k0[i]] - suffix[k0[i] + m[j]] < 0.0) ++hits[i * nd + j];
      }
    }
#pragma omp critical
    for (std::size_t c = 0; c < n_cells; ++c) {
      neg_entangled[c] += local_e[c];
      neg_separable[c] += local_s[c];
    }
  }

  RateGrid grid;
  grid.axes = axes;
  grid.tau = tau;
  grid.eta = eta;
  grid.cells.resize(n_cells);
  const std::size_t n_separable = ensemble.size() - n_entangled;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t j = 0; j < nd; ++j) {
      RateCell& c = grid.cells[i * nd + j];
      const std::size_t idx = i * nd + j;
      c.t_i = axes.t_i[i];
      c.delta_t = axes.delta_t[j];
      c.tau = tau.at(axes.delta_t[j]);
      c.n_entangled = n_entangled;
      c.n_separable = n_separable;
      c.success_rate = n_entangled ? static_cast<double>(neg_entangled[idx]) / static_cast<double>(n_entangled) : nan;
      c.error_rate = n_separable ? static_cast<double>(neg_separable[idx]) / static_cast<double>(n_separable) : nan;
    }
  return grid;
}

std::optional<double> min_crossing_t_i(const RateGrid& grid, double level) {
  std::optional<double> best;
  for (const auto& c : grid.cells)
    if (!std::isnan(c.success_rate) && c.success_rate >= level && (!best || c.t_i < *best)) best = c.t_i;
  return best;
}

}  // namespace halfparity
