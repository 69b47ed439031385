#include "halfparity/analytic.hpp"
#include "halfparity/ensemble.hpp"
#include "halfparity/error.hpp"
#include "halfparity/estimator.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace halfparity;

namespace {

// Record that follows the closed form at a fixed integrated outcome J.
TrajectoryRecord closed_form_record(double J, double dt, double t_max, double epsilon = 1.0) {
  TrajectoryRecord r;
  r.dt = dt;
  const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
  r.samples.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    auto& s = r.samples[k];
    s.t = static_cast<double>(k) * dt;
    s.outcome = k == 0 ? std::numeric_limits<double>::quiet_NaN() : J;
    const ClosedFormPoint p{J, s.t, 1.0, epsilon};
    s.energy = heat_closed(p);
    s.populations = populations(state_closed(p));
    s.concurrence = concurrence_closed(p);
  }
  return r;
}

double simpson(double a, double b, int n, double (*f)(double)) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double odd_sigma(double u) { return (std::exp(-4 * u) + std::exp(-2 * u)) / std::pow(1 + std::exp(-2 * u), 2); }

EstimatorTrace flat_trace(std::size_t n, double dt, double heat, double increment) {
  EstimatorTrace t;
  t.dt = dt;
  t.heat.assign(n + 1, heat);
  t.increment.assign(n, increment);
  return t;
}

}  // namespace

TEST_CASE("estimator config validation") {
  EstimatorConfig est;
  CHECK_NOTHROW(est.validate(1e-3, 10.0));
  est.tau = 1e-4;
  CHECK_THROWS_AS(est.validate(1e-3, 10.0), DomainError);
  est = EstimatorConfig{};
  est.t_i = 9.9;
  CHECK_THROWS_AS(est.validate(1e-3, 10.0), DomainError);
  est = EstimatorConfig{};
  est.delta_t = 0.0;
  CHECK_THROWS_AS(est.validate(1e-3, 10.0), DomainError);
  est = EstimatorConfig{};
  est.concurrence_threshold = 0.0;
  CHECK_THROWS_AS(est.validate(1e-3, 10.0), DomainError);
}

TEST_CASE("witness on closed-form branches") {
  SimulationConfig cfg;
  cfg.dt = 1e-4;
  const TrajectoryRecord odd = closed_form_record(0.0, cfg.dt, 2.5);
  const double exact = -simpson(1.0, 2.0, 2000, odd_sigma);
  CHECK(exact == doctest::Approx(-0.0542).epsilon(1e-3));
  CHECK(witness(odd, 1.0, 1.0, cfg) == doctest::Approx(exact).epsilon(1e-4));
  for (double ti : {0.0, 0.5, 2.0}) CHECK(witness(odd, ti, 0.3, cfg) < 0.0);

  // pinned at |uu> after leaving the initial state: Q~ = 1, sigma~ ~ 0
  TrajectoryRecord pinned = closed_form_record(1.0, 1e-3, 8.0);
  for (std::size_t k = 1; k < pinned.samples.size(); ++k) pinned.samples[k].energy = 1.0;
  SimulationConfig c3;
  c3.dt = 1e-3;
  CHECK(witness(pinned, 6.0, 1.0, c3) == doctest::Approx(2.0).epsilon(1e-4));

  CHECK_THROWS_AS(witness(odd, 2.0, 1.0, cfg), DomainError);
  SimulationConfig mixed = cfg;
  mixed.eta = 0.5;
  CHECK_THROWS_AS(witness(odd, 0.0, 1.0, mixed), DomainError);
}

TEST_CASE("negative witness means sigma~ dominates 2 Q~^2 on average") {
  SimulationConfig cfg;
  cfg.dt = 1e-3;
  for (double J : {-1.2, -0.6, -0.2, 0.0, 0.1, 0.4, 0.8, 1.0}) {
    const TrajectoryRecord r = closed_form_record(J, cfg.dt, 6.0);
    for (double ti : {0.0, 1.0, 3.0}) {
      const double w = witness(r, ti, 2.0, cfg);
      double avg = 0.0;
      const auto k0 = static_cast<std::size_t>(std::llround(ti / cfg.dt));
      for (std::size_t k = k0; k < k0 + 2000; ++k) {
        const auto& s = r.samples[k];
        avg += sigma_tilde({k ? J : 0.0, s.t, 1.0, 1.0}) - 2 * s.energy * s.energy;
      }
      if (w < 0) CHECK(avg / 2000 >= 0.0);
    }
  }
}

TEST_CASE("single-shot estimator limits") {
  const double dt = 1e-3;
  EstimatorConfig est{8.0, 1.0, 0.3};
  const double small = estimator_ss(flat_trace(10000, dt, 0.0, 1e-7), est);
  CHECK(small < 0.0);
  CHECK(small > -1e-6);
  CHECK(estimator_ss(flat_trace(10000, dt, 1.0, 0.0), est) == doctest::Approx(2.0));
  CHECK(estimator_ss(flat_trace(10000, dt, 0.0, 0.0), est) == 0.0);
  est.units = FluctuationUnits::Sigma;
  CHECK(estimator_ss(flat_trace(10000, dt, 0.0, 2 * std::sqrt(dt)), est) == doctest::Approx(-1.0));
}

TEST_CASE("estimator sign on closed-form branches") {
  SimulationConfig cfg;
  cfg.dt = 1e-3;
  const TrajectoryRecord odd = closed_form_record(0.0, cfg.dt, 10.0);
  const TrajectoryRecord even = closed_form_record(1.0, cfg.dt, 10.0);
  auto trace_of = [&](const TrajectoryRecord& r) {
    EstimatorTrace t;
    t.dt = r.dt;
    for (const auto& s : r.samples) t.heat.push_back(s.energy);
    for (std::size_t k = 0; k + 1 < r.samples.size(); ++k)
      t.increment.push_back(r.samples[k + 1].energy - r.samples[k].energy + 1e-4);
    return t;
  };
  const EstimatorTrace to = trace_of(odd), te = trace_of(even);
  for (double ti : {0.0, 1.0, 4.0, 8.0})
    for (double d : {0.4, 1.0, 2.0}) {
      CHECK(estimator_ss(to, {ti, d, d}) <= 0.0);
      if (ti >= 4.0) CHECK(estimator_ss(te, {ti, d, d}) >= 0.0);
    }
}

TEST_CASE("traces: record-based and streaming agree; epsilon scale invariance") {
  SimulationConfig cfg;
  cfg.t_max = 2.0;
  const TrajectoryRecord r = run_trajectory(cfg, 6);
  const EstimatorTrace a = make_trace(r, cfg);
  const EstimatorTrace b = run_estimator_trace(cfg, 6);
  REQUIRE(a.heat.size() == b.heat.size());
  for (std::size_t k = 0; k < a.heat.size(); ++k) CHECK(a.heat[k] == doctest::Approx(b.heat[k]).epsilon(1e-12));
  for (std::size_t k = 0; k < a.increment.size(); ++k) CHECK(a.increment[k] == b.increment[k]);
  CHECK(a.final_concurrence == b.final_concurrence);

  const EstimatorConfig est{0.5, 1.0, 0.4};
  SimulationConfig scaled = cfg;
  scaled.epsilon = 3.7;
  const double e1 = estimator_ss(r, est, cfg);
  const double e2 = estimator_ss(run_trajectory(scaled, 6), est, scaled);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
}

TEST_CASE("rate grid agrees with per-trajectory evaluation") {
  SimulationConfig cfg;
  cfg.t_max = 4.0;
  cfg.n_traj = 40;
  const auto traces = run_estimator_ensemble(cfg);
  GridAxes axes{{0.0, 1.0, 2.5}, {0.4, 1.5}};
  for (TauSpec tau : {TauSpec::fixed(0.1), TauSpec::window()}) {
    const RateGrid grid = rate_grid(traces, axes, tau, 0.5);
    for (std::size_t i = 0; i < axes.t_i.size(); ++i)
      for (std::size_t j = 0; j < axes.delta_t.size(); ++j) {
        std::size_t ent = 0, sep = 0, neg_e = 0, neg_s = 0;
        const EstimatorConfig est{axes.t_i[i], axes.delta_t[j], tau.at(axes.delta_t[j]), 0.5};
        for (const auto& t : traces) {
          const bool e = t.final_concurrence >= 0.5;
          const bool neg = estimator_ss(t, est) < 0.0;
          (e ? ent : sep)++;
          if (neg) (e ? neg_e : neg_s)++;
        }
        const RateCell& c = grid.at(i, j);
        CHECK(c.n_entangled == ent);
        CHECK(c.n_separable == sep);
        CHECK(c.n_entangled + c.n_separable == traces.size());
        if (ent) CHECK(c.success_rate == doctest::Approx(double(neg_e) / ent));
        if (sep) CHECK(c.error_rate == doctest::Approx(double(neg_s) / sep));
        CHECK(c.tau == tau.at(axes.delta_t[j]));
      }
  }
}

TEST_CASE("rate grid undefined cells and bad windows") {
  std::vector<EstimatorTrace> traces(3, flat_trace(5000, 1e-3, 0.0, 1e-3));
  for (auto& t : traces) t.final_concurrence = 0.1;
  const RateGrid grid = rate_grid(traces, {{0.0, 1.0}, {0.5}}, TauSpec::fixed(0.1));
  CHECK(std::isnan(grid.at(0, 0).success_rate));
  CHECK(grid.at(0, 0).error_rate == 1.0);
  CHECK(grid.max_error_rate() == 1.0);
  CHECK_FALSE(min_crossing_t_i(grid).has_value());
  CHECK_THROWS_AS(rate_grid(traces, {{4.8}, {0.5}}, TauSpec::fixed(0.1)), DomainError);
  CHECK_THROWS_AS(rate_grid({}, {{0.0}, {0.5}}, TauSpec::fixed(0.1)), DomainError);

  for (auto& t : traces) t.final_concurrence = 0.9;
  const RateGrid all_ent = rate_grid(traces, {{0.0, 1.0}, {0.5}}, TauSpec::fixed(0.1));
  CHECK(std::isnan(all_ent.at(1, 0).error_rate));
  CHECK(min_crossing_t_i(all_ent).value() == 0.0);
}

TEST_CASE("grid axes and tau labels") {
  const GridAxes axes = GridAxes::default_axes();
  REQUIRE(axes.t_i.size() == 26);
  REQUIRE(axes.delta_t.size() == 25);
  CHECK(axes.t_i.front() == 0.0);
  CHECK(axes.t_i.back() == 10.0);
  CHECK(axes.delta_t.front() == doctest::Approx(0.4));
  CHECK(axes.delta_t.back() == 10.0);
  CHECK(TauSpec::fixed(0.1).label() == "0.1");
  CHECK(TauSpec::fixed(2.0).label() == "2");
  CHECK(TauSpec::window().label() == "delta_t");
  CHECK(TauSpec::window().at(3.0) == 3.0);
}

TEST_CASE("success rate is non-decreasing in t_i up to noise") {
  SimulationConfig cfg;
  cfg.t_max = 20.0;
  cfg.n_traj = 1000;
  const auto traces = run_estimator_ensemble(cfg);
  const GridAxes axes = GridAxes::default_axes();
  const RateGrid grid = rate_grid(traces, axes, TauSpec::window());
  double worst = 0.0;
  for (std::size_t j = 0; j < axes.delta_t.size(); ++j) {
    // pool-adjacent-violators fit
    std::vector<double> level, weight;
    std::vector<std::size_t> size;
    for (std::size_t i = 0; i < axes.t_i.size(); ++i) {
      level.push_back(grid.at(i, j).success_rate);
      weight.push_back(1.0);
      size.push_back(1);
      while (level.size() > 1 && level[level.size() - 2] > level.back()) {
        const double w = weight[weight.size() - 2] + weight.back();
        const double v = (level[level.size() - 2] * weight[weight.size() - 2] + level.back() * weight.back()) / w;
        const std::size_t s = size[size.size() - 2] + size.back();
        level.pop_back();
        weight.pop_back();
        size.pop_back();
        level.back() = v;
        weight.back() = w;
        size.back() = s;
      }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < level.size(); ++b)
      for (std::size_t r = 0; r < size[b]; ++r, ++i) worst = std::max(worst, std::abs(grid.at(i, j).success_rate - level[b]));
  }
  CHECK(worst < 0.05);
}
