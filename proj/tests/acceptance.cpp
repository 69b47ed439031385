// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include "halfparity/analytic.hpp"
#include "halfparity/ensemble.hpp"
#include "halfparity/estimator.hpp"
#include "halfparity/sde_engine.hpp"
#include "halfparity/trajectory_analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

using namespace halfparity;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<ClosedFormPoint> oracle_grid() {
  std::vector<ClosedFormPoint> pts;
  const double ts[] = {0.01, 0.1, 0.3, 0.6, 1.0, 1.5, 2.5, 4.0, 6.5, 10.0};
  for (int i = 0; i < 20; ++i)
    for (double t : ts) pts.push_back({-1.5 + 3.0 * i / 19.0, t, 1.0, 1.0});
  return pts;
}

Verdict oracle_equivalence() {
  double worst = 0.0;
  for (const auto& p : oracle_grid()) {
    const PureState s = state_closed(p);
    const Populations pp = populations(s);
    worst = std::max({worst, std::abs(concurrence_closed(p) - concurrence_pure(s)),
                      std::abs(heat_closed(p) - internal_energy(s, p.epsilon)),
                      std::abs(sigma_tilde(p) - (4 * pp.uu * pp.dd + pp.even() * pp.odd())),
                      std::abs(sigma_eo_tilde(p) - pp.even() * pp.odd())});
  }
  return {worst < 1e-12, fmt::format("max deviation {:.2e} over 200 points (limit 1e-12)", worst)};
}

Verdict rate_bounds() {
  int violations = 0;
  for (const auto& p : oracle_grid()) {
    const RateBounds b = bounds(p);
    const double d = dC_dt_ensemble(p);
    if (!(b.lower <= d + 1e-12 && d <= b.upper + 1e-12)) ++violations;
  }
  return {violations == 0, fmt::format("{} violations of lower <= dC/dt <= upper over 200 points", violations)};
}

Verdict odd_identity() {
  double worst = 0.0;
  for (int i = 1; i <= 1000; ++i) worst = std::max(worst, std::abs(long_time_equality_residual(0.01 * i, 1.0)));
  return {worst < 1e-12, fmt::format("max |dC/dt - 4 Gamma sigma_eo| = {:.2e} on Gamma t in (0, 10]", worst)};
}

// Integrates the SSE on a Brownian path sampled at dt_fine, stepping with
// `merge` consecutive increments per step. Returns 1 - fidelity to the closed
// form at the realized J.
double endpoint_infidelity(const SimulationConfig& base, std::size_t index, int merge) {
  SimulationConfig cfg = base;
  cfg.dt = base.dt * merge;
  WienerSource noise(base.master_seed, index, base.dt);
  const std::size_t steps = cfg.n_steps();
  PureState psi = PureState::initial();
  double integral = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    double dW = 0.0;
    for (int j = 0; j < merge; ++j) dW += noise.next();
    const PureStepResult r = sse_step(psi, dW, cfg);
    integral += r.record * cfg.dt;
    psi = r.state;
  }
  const double t = static_cast<double>(steps) * cfg.dt;
  return 1.0 - fidelity(psi, state_closed({integral / t, t, cfg.gamma, cfg.epsilon}));
}

Verdict sse_closed_form() {
  SimulationConfig fine;
  fine.dt = 5e-5;
  fine.t_max = 1.0;
  double worst = 0.0, mean_dt = 0.0, mean_half = 0.0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const double coarse = endpoint_infidelity(fine, i, 2);  // Gamma dt = 1e-4
    const double half = endpoint_infidelity(fine, i, 1);    // Gamma dt = 5e-5, same path
    worst = std::max(worst, coarse);
    mean_dt += coarse / n;
    mean_half += half / n;
  }
  SimulationConfig quarter = fine;
  quarter.dt = 2.5e-5;
  double mean_quarter = 0.0;
  for (int i = 0; i < n; ++i) mean_quarter += endpoint_infidelity(quarter, i, 1) / n;
  const bool pass = worst <= 1e-4 && mean_half < mean_dt;
  return {pass, fmt::format("max infidelity {:.2e} at dt=1e-4 over {} trajectories; mean infidelity {:.2e} -> {:.2e} "
                            "with dt halved (dt/4 on other paths: {:.2e})",
                            worst, n, mean_dt, mean_half, mean_quarter)};
}

struct ClassStats {
  std::size_t n = 0;
  std::array<std::size_t, 3> count{};
  std::array<double, 3> mean_C{}, mean_Q{};
  double mean_Q_all = 0.0, sem_Q_all = 0.0;
};

ClassStats postselection_ensemble() {
  SimulationConfig cfg;
  cfg.n_traj = 800;
  cfg.record_stride = 1000;
  ClassStats d;
  d.n = cfg.n_traj;
  double q = 0.0, q2 = 0.0;
  std::array<double, 3> c{}, qc{};
  for (std::size_t first = 0; first < cfg.n_traj; first += 100) {
    for (const auto& r : run_ensemble(cfg, first, std::min<std::size_t>(100, cfg.n_traj - first))) {
      const auto& last = r.final_sample();
      const int k = static_cast<int>(classify_outcome(last.outcome));
      ++d.count[k];
      c[k] += last.concurrence;
      qc[k] += last.heat;
      q += last.heat;
      q2 += last.heat * last.heat;
    }
  }
  const double n = static_cast<double>(d.n);
  for (int k = 0; k < 3; ++k) {
    d.mean_C[k] = c[k] / static_cast<double>(d.count[k]);
    d.mean_Q[k] = qc[k] / static_cast<double>(d.count[k]);
  }
  d.mean_Q_all = q / n;
  d.sem_Q_all = std::sqrt((q2 / n - d.mean_Q_all * d.mean_Q_all) * n / (n - 1) / n);
  return d;
}

Verdict qnd_balance(const ClassStats& d) {
  const bool pass = std::abs(d.mean_Q_all) <= 3 * d.sem_Q_all;
  return {pass, fmt::format("mean final Q = {:.4f} eps, 3 SE = {:.4f} eps over {} trajectories at Gamma t = 10",
                            d.mean_Q_all, 3 * d.sem_Q_all, d.n)};
}

Verdict postselected(const ClassStats& d) {
  const int odd = 0, plus = 1, minus = 2;
  const double n = static_cast<double>(d.n);
  bool fractions_ok = true;
  const double expected[3] = {0.5, 0.25, 0.25};
  std::string fr;
  for (int k = 0; k < 3; ++k) {
    const double f = static_cast<double>(d.count[k]) / n;
    const double se = std::sqrt(expected[k] * (1 - expected[k]) / n);
    fractions_ok = fractions_ok && std::abs(f - expected[k]) <= 3 * se;
    fr += fmt::format("{}{:.3f}", k ? "/" : "", f);
  }
  const bool pass = d.mean_C[odd] >= 0.98 && std::abs(d.mean_Q[odd]) <= 0.05 &&
                    std::abs(d.mean_Q[plus] - 1.0) <= 0.05 && std::abs(d.mean_Q[minus] + 1.0) <= 0.05 && fractions_ok;
  return {pass, fmt::format("odd: C={:.4f} Q={:.4f}; even+: Q={:.4f}; even-: Q={:.4f}; fractions odd/+/- = {} "
                            "(expected 0.5/0.25/0.25 within 3 binomial SE)",
                            d.mean_C[odd], d.mean_Q[odd], d.mean_Q[plus], d.mean_Q[minus], fr)};
}

Verdict estimator_rates() {
  const GridAxes axes = GridAxes::default_axes();
  const GridAxes fine_axes{GridAxes::linspace(0.0, 10.0, 101), axes.delta_t};
  SimulationConfig cfg;
  cfg.n_traj = 1000;
  cfg.t_max = 20.0;

  std::vector<std::string> notes;
  bool pass = true;
  auto note = [&](bool ok, std::string text) {
    pass = pass && ok;
    notes.push_back(fmt::format("{} {}", ok ? "ok" : "FAILED", text));
  };

  const auto traces = run_estimator_ensemble(cfg);
  const RateGrid g01 = rate_grid(traces, axes, TauSpec::fixed(0.1));
  const RateGrid g04 = rate_grid(traces, axes, TauSpec::fixed(0.4));
  const RateGrid gdt = rate_grid(traces, axes, TauSpec::window());
  const double err_a = std::max(g01.max_error_rate(), g04.max_error_rate());
  note(err_a <= 0.005, fmt::format("(a) max error rate tau=0.1/0.4: {:.2f}% (tau=0.1: {:.2f}%, tau=0.4: {:.2f}%; limit 0.5%)",
                                   100 * err_a, 100 * g01.max_error_rate(), 100 * g04.max_error_rate()));
  note(gdt.max_error_rate() <= 0.02,
       fmt::format("(b) max error rate tau=delta_t: {:.2f}% (limit 2%)", 100 * gdt.max_error_rate()));

  const RateCell c = rate_grid(traces, {{3.0}, {0.3}}, TauSpec::window()).at(0, 0);
  note(c.success_rate >= 0.5 && c.error_rate <= 0.01,
       fmt::format("(c) t_i=3, tau=delta_t=0.3: success {:.3f}, error {:.2f}%", c.success_rate, 100 * c.error_rate));

  double late = 1.0;
  for (const RateGrid* g : {&g01, &g04, &gdt})
    for (const auto& cell : g->cells)
      if (cell.t_i >= 8.0 - 1e-9) late = std::min(late, cell.success_rate);
  note(late >= 0.95, fmt::format("(d) min success for t_i >= 8: {:.3f}", late));

  const double targets[] = {3.0, 6.4, 3.8, 3.4};
  const double etas[] = {1.0, 0.5, 0.8, 0.9};
  std::string crossings;
  bool crossings_ok = true;
  for (int e = 0; e < 4; ++e) {
    RateGrid g;
    if (etas[e] == 1.0) {
      g = rate_grid(traces, fine_axes, TauSpec::window(), 0.8, 1.0);
    } else {
      SimulationConfig m = cfg;
      m.eta = etas[e];
      const auto mixed = run_estimator_ensemble(m);
      g = rate_grid(mixed, fine_axes, TauSpec::window(), 0.8, etas[e]);
      if (etas[e] == 0.5) {
        double best = 0.0;
        for (std::size_t i = 0; i < fine_axes.t_i.size(); ++i)
          best = std::max(best, g.at(i, fine_axes.delta_t.size() - 1).success_rate);
        note(best >= 0.7, fmt::format("(e) eta=0.5, delta_t=10: best success {:.3f} (limit 0.7)", best));
      }
    }
    const auto x = min_crossing_t_i(g);
    const bool ok = x && std::abs(*x - targets[e]) <= 1.0;
    crossings_ok = crossings_ok && ok;
    crossings += fmt::format("{}eta={}: {} (target {})", e ? ", " : "", etas[e], x ? fmt::format("{:.1f}", *x) : "none",
                             targets[e]);
  }
  note(crossings_ok, "50% crossings " + crossings);

  std::string detail;
  for (const auto& n : notes) detail += "\n    " + n;
  return {pass, detail};
}

Verdict sme_consistency() {
  SimulationConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 1.0;
  double worst_td = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    WienerSource noise(cfg.master_seed, i, cfg.dt);
    PureState psi = PureState::initial();
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    for (std::size_t k = 0; k < cfg.n_steps(); ++k) {
      const double dW = noise.next();
      psi = sse_step(psi, dW, cfg).state;
      rho = sme_step(rho, dW, cfg).rho;
    }
    worst_td = std::max(worst_td, trace_distance(rho, DensityMatrix::from_pure(psi)));
  }

  SimulationConfig half;
  half.eta = 0.5;
  half.n_traj = 20;
  double trace_err = 0.0, min_eig = 1.0;
  for (const auto& r : run_ensemble(half)) {
    for (const auto& rho : r.mixed_states) {
      trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
      min_eig = std::min(min_eig, rho.min_eigenvalue());
    }
  }
  const bool pass = worst_td < 1e-5 && trace_err <= 1e-10 && min_eig >= -1e-6;
  return {pass, fmt::format("eta=1 SME vs SSE trace distance {:.2e} (20 shared paths, Gamma t = 1); eta=0.5: "
                            "max |tr-1| {:.1e}, min eigenvalue {:.2e} over 20 x 10^4 steps",
                            worst_td, trace_err, min_eig)};
}

Verdict outcome_distribution() {
  SimulationConfig cfg;
  cfg.n_traj = 1000;
  cfg.master_seed += 1;
  cfg.record_stride = cfg.n_steps();
  std::vector<double> J;
  for (std::size_t first = 0; first < cfg.n_traj; first += 200)
    for (const auto& r : run_ensemble(cfg, first, 200)) J.push_back(r.final_sample().outcome);
  std::sort(J.begin(), J.end());
  const double n = static_cast<double>(J.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < J.size(); ++i) {
    const double F = outcome_cdf(J[i], cfg.t_max, cfg.gamma);
    ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  return {ks < 0.05, fmt::format("KS distance {:.4f} over {} trajectories at Gamma t = 10 (limit 0.05)", ks, J.size())};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](const char* name, const std::function<Verdict()>& check) {
    const auto t0 = clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    fmt::print("{} {} [{:.1f} s]: {}\n", v.pass ? "PASS" : "FAIL", name, secs, v.detail);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };

  report("closed-form oracle consistency", oracle_equivalence);
  report("energetic bounds on the concurrence rate", rate_bounds);
  report("odd-branch rate identity", odd_identity);
  report("SSE endpoint vs closed form", sse_closed_form);
  ClassStats stats;
  report("post-selection ensemble", [&] {
    stats = postselection_ensemble();
    return Verdict{true, fmt::format("{} trajectories integrated", stats.n)};
  });
  report("QND heat balance", [&] { return qnd_balance(stats); });
  report("post-selected class averages", [&] { return postselected(stats); });
  report("single-shot estimator rates", estimator_rates);
  report("SME consistency", sme_consistency);
  report("outcome distribution", outcome_distribution);

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
