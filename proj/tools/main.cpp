// halfparity command-line front end: simulate, analytic, estimator-grid.
//
// Exit codes: 0 ok, 1 invalid configuration or arguments, 2 integration
// failure, 3 I/O failure.

#include "halfparity/analytic.hpp"
#include "halfparity/config.hpp"
#include "halfparity/csv_io.hpp"
#include "halfparity/ensemble.hpp"
#include "halfparity/error.hpp"
#include "halfparity/estimator.hpp"
#include "halfparity/trajectory_analysis.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace halfparity;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kIntegration = 2, kIo = 3 };

struct SimFlags {
  std::string config;
  std::optional<double> gamma, epsilon, dt, tmax, eta;
  std::optional<std::size_t> ntraj, stride, workers;
  std::optional<std::uint64_t> seed;
  std::string out = ".";

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--gamma", gamma, "measurement rate Gamma");
    cmd->add_option("--epsilon", epsilon, "qubit energy epsilon");
    cmd->add_option("--dt", dt, "time step");
    cmd->add_option("--tmax", tmax, "final time");
    cmd->add_option("--eta", eta, "detection efficiency");
    cmd->add_option("--ntraj", ntraj, "number of trajectories");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--stride", stride, "store every k-th step");
    cmd->add_option("--workers", workers, "worker threads (0: all)");
    cmd->add_option("--out", out, "output directory");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    if (gamma) cfg.sim.gamma = *gamma;
    if (epsilon) cfg.sim.epsilon = *epsilon;
    if (dt) cfg.sim.dt = *dt;
    if (tmax) cfg.sim.t_max = *tmax;
    if (eta) cfg.sim.eta = *eta;
    if (ntraj) cfg.sim.n_traj = *ntraj;
    if (seed) cfg.sim.master_seed = *seed;
    if (stride) cfg.sim.record_stride = *stride;
    if (workers) cfg.n_workers = *workers;
    return cfg;
  }
};

json sim_json(const SimulationConfig& s) {
  return {{"gamma", s.gamma},   {"epsilon", s.epsilon},         {"dt", s.dt},
          {"t_max", s.t_max},   {"eta", s.eta},                 {"n_traj", s.n_traj},
          {"master_seed", s.master_seed}, {"record_stride", s.record_stride}};
}

json config_json(const RunConfig& cfg) {
  json taus = json::array();
  for (const auto& t : cfg.taus) taus.push_back(t.label());
  json j = sim_json(cfg.sim);
  j["taus"] = taus;
  j["etas"] = cfg.grid_etas();
  j["t_i"] = cfg.axes.t_i;
  j["delta_t"] = cfg.axes.delta_t;
  j["concurrence_threshold"] = cfg.concurrence_threshold;
  j["units"] = std::string(to_string(cfg.units));
  j["trajectory_files"] = std::string(to_string(cfg.trajectory_files));
  return j;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

void finish_file(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(fmt::format("cannot create directory {}", dir.string()));
}

json outputs_json(const fs::path& dir, const std::vector<fs::path>& files) {
  json out = json::array();
  for (const auto& f : files)
    out.push_back({{"file", fs::relative(f, dir).generic_string()}, {"sha256", sha256_file(f)}});
  return out;
}

void write_manifest(const fs::path& dir, json manifest, double seconds) {
  manifest["wall_clock_seconds"] = seconds;
  const fs::path path = dir / "manifest.json";
  auto out = open_out(path);
  out << manifest.dump(2) << '\n';
  finish_file(out, path);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_simulate(const SimFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = flags.resolve();
  cfg.sim.validate();
  const fs::path dir = flags.out;
  make_dir(dir);

  std::vector<fs::path> files;
  std::ofstream concatenated;
  const fs::path concat_path = dir / "trajectories.csv";
  if (cfg.trajectory_files == TrajectoryFiles::Concatenated) {
    concatenated = open_out(concat_path);
    concatenated << kTrajectoryHeader << '\n';
  }

  // Fixed-size batches keep memory bounded; the single writer walks each batch
  // in index order.
  const std::size_t batch = 32;
  SummaryAccumulator summary;
  for (std::size_t first = 0; first < cfg.sim.n_traj; first += batch) {
    const std::size_t count = std::min(batch, cfg.sim.n_traj - first);
    const auto records = run_ensemble(cfg.sim, first, count, cfg.n_workers);
    for (const auto& r : records) {
      const auto& last = r.final_sample();
      if (cfg.sim.gamma * last.t >= 6.0 - 1e-9) {
        const OutcomeClass c = classify_outcome(last.outcome);
        summary.add(r, &c);
      } else {
        summary.add(r, nullptr);
      }
      if (cfg.trajectory_files == TrajectoryFiles::Concatenated) {
        write_trajectory_rows(concatenated, r);
      } else if (cfg.trajectory_files == TrajectoryFiles::PerTrajectory) {
        const fs::path path = dir / fmt::format("traj_{:05d}.csv", r.index);
        auto out = open_out(path);
        out << kTrajectoryHeader << '\n';
        write_trajectory_rows(out, r);
        finish_file(out, path);
        files.push_back(path);
      }
    }
  }
  if (cfg.trajectory_files == TrajectoryFiles::Concatenated) {
    finish_file(concatenated, concat_path);
    files.insert(files.begin(), concat_path);
  }

  const EnsembleSummary result = summary.finish();
  for (const auto& w : result.warnings) fmt::print(stderr, "warning: {}\n", w);
  const fs::path summary_path = dir / "summary.csv";
  auto out = open_out(summary_path);
  write_summary(out, result);
  finish_file(out, summary_path);
  files.push_back(summary_path);

  json counts = {{"all", result.all.count}};
  if (result.classified)
    for (auto c : {OutcomeClass::Odd, OutcomeClass::EvenPlus, OutcomeClass::EvenMinus})
      counts[std::string(to_string(c))] = result.of(c).count;

  json manifest = {{"tool", "halfparity"}, {"version", HALFPARITY_VERSION}, {"command", "simulate"},
                   {"config", config_json(cfg)}, {"master_seed", cfg.sim.master_seed},
                   {"class_counts", counts}, {"warnings", result.warnings},
                   {"outputs", outputs_json(dir, files)}};
  write_manifest(dir, manifest, seconds_since(start));
  return kOk;
}

struct AnalyticFlags {
  std::string quantity;
  std::string j_range = "-1.5:1.5:61";
  std::string t_range = "0:10:101";
  double gamma = 1.0;
  double epsilon = 1.0;
  std::string out;
};

std::vector<double> parse_range(std::string_view name, const std::string& text) {
  RunConfig scratch;
  apply_setting(scratch, "t_i", text);
  if (scratch.axes.t_i.empty()) throw DomainError(fmt::format("empty {} range", name));
  return scratch.axes.t_i;
}

int cmd_analytic(const AnalyticFlags& flags) {
  static const std::vector<std::string> known{"concurrence", "heat", "sigma", "sigma_eo", "dcdt", "bounds", "pdf"};
  if (std::find(known.begin(), known.end(), flags.quantity) == known.end())
    throw DomainError(fmt::format("unknown quantity '{}'", flags.quantity));
  const auto Js = parse_range("J", flags.j_range);
  const auto ts = parse_range("t", flags.t_range);

  NumericTable table;
  table.columns = flags.quantity == "bounds" ? std::vector<std::string>{"J", "t", "lower", "dcdt", "upper"}
                                             : std::vector<std::string>{"J", "t", "value"};
  for (double t : ts)
    for (double J : Js) {
      const ClosedFormPoint p{J, t, flags.gamma, flags.epsilon};
      const std::string& q = flags.quantity;
      if (q == "bounds") {
        const RateBounds b = bounds(p);
        table.rows.push_back({J, t, b.lower, dC_dt_ensemble(p), b.upper});
        continue;
      }
      double v = 0.0;
      if (q == "concurrence") v = concurrence_closed(p);
      else if (q == "heat") v = heat_closed(p);
      else if (q == "sigma") v = sigma_tilde(p);
      else if (q == "sigma_eo") v = sigma_eo_tilde(p);
      else if (q == "dcdt") v = dC_dt_ensemble(p);
      else v = outcome_pdf(J, t, flags.gamma);
      table.rows.push_back({J, t, v});
    }

  if (flags.out.empty() || flags.out == "-") {
    std::ostringstream buf;
    write_table(buf, table);
    std::fputs(buf.str().c_str(), stdout);
    return kOk;
  }
  const fs::path path = flags.out;
  if (path.has_parent_path()) make_dir(path.parent_path());
  auto out = open_out(path);
  write_table(out, table);
  finish_file(out, path);
  return kOk;
}

struct GridFlags : SimFlags {
  std::string taus, etas;
};

int cmd_estimator_grid(const GridFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg = flags.resolve();
  if (!flags.taus.empty()) apply_setting(cfg, "taus", flags.taus);
  if (!flags.etas.empty()) apply_setting(cfg, "etas", flags.etas);
  if (cfg.taus.empty()) throw DomainError("no coarse-graining times given");

  SimulationConfig sim = cfg.sim;
  sim.t_max = cfg.grid_t_max();
  sim.record_stride = 1;
  for (double eta : cfg.grid_etas()) {
    SimulationConfig s = sim;
    s.eta = eta;
    s.validate();
    for (const auto& tau : cfg.taus)
      for (double ti : cfg.axes.t_i)
        for (double d : cfg.axes.delta_t)
          EstimatorConfig{ti, d, tau.at(d), cfg.concurrence_threshold, eta, cfg.units}.validate(s.dt, s.t_max);
  }

  const fs::path dir = flags.out;
  make_dir(dir);
  std::vector<fs::path> files;
  json grids = json::array();
  for (double eta : cfg.grid_etas()) {
    SimulationConfig s = sim;
    s.eta = eta;
    const auto traces = run_estimator_ensemble(s, cfg.n_workers);
    for (const auto& tau : cfg.taus) {
      const RateGrid grid = rate_grid(traces, cfg.axes, tau, cfg.concurrence_threshold, eta, cfg.units);
      const fs::path path = dir / fmt::format("rate_grid_tau-{}_eta-{}.csv", tau.label(), eta);
      auto out = open_out(path);
      write_rate_grid(out, grid);
      finish_file(out, path);
      files.push_back(path);
      const auto crossing = min_crossing_t_i(grid);
      grids.push_back({{"file", path.filename().string()}, {"tau", tau.label()}, {"eta", eta},
                       {"max_error_rate", grid.max_error_rate()},
                       {"min_t_i_success_50", crossing ? json(*crossing) : json(nullptr)}});
    }
  }

  json manifest = {{"tool", "halfparity"}, {"version", HALFPARITY_VERSION}, {"command", "estimator-grid"},
                   {"config", config_json(cfg)}, {"simulated_t_max", sim.t_max},
                   {"master_seed", cfg.sim.master_seed}, {"grids", grids},
                   {"outputs", outputs_json(dir, files)}};
  write_manifest(dir, manifest, seconds_since(start));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two qubits under continuous half-parity measurement"};
  app.set_version_flag("--version", std::string(HALFPARITY_VERSION));
  app.require_subcommand(1);

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "integrate an ensemble, write trajectories and summary");
  sim_flags.attach(simulate);

  AnalyticFlags an;
  auto* analytic = app.add_subcommand("analytic", "tabulate a closed-form quantity over a (J, t) grid");
  analytic->add_option("--quantity", an.quantity, "concurrence|heat|sigma|sigma_eo|dcdt|bounds|pdf")->required();
  analytic->add_option("--j-range", an.j_range, "J values as start:stop:count or a comma list");
  analytic->add_option("--t-range", an.t_range, "t values as start:stop:count or a comma list");
  analytic->add_option("--gamma", an.gamma, "measurement rate Gamma");
  analytic->add_option("--epsilon", an.epsilon, "qubit energy epsilon");
  analytic->add_option("--out", an.out, "output CSV path (default stdout)");

  GridFlags grid_flags;
  auto* grid = app.add_subcommand("estimator-grid", "success/error rates of the single-shot estimator");
  grid_flags.attach(grid);
  grid->add_option("--taus", grid_flags.taus, "coarse-graining times, e.g. 0.1,0.4,delta_t");
  grid->add_option("--etas", grid_flags.etas, "efficiencies, e.g. 1,0.5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_flags);
    if (*analytic) return cmd_analytic(an);
    if (*grid) return cmd_estimator_grid(grid_flags);
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfig;
  } catch (const IntegrationError& e) {
    fmt::print(stderr, "integration failure: {}\n", e.what());
    return kIntegration;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  }
  return kConfig;
}
