#include "halfparity/config.hpp"

#include "halfparity/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace halfparity {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw DomainError(fmt::format("invalid value for {}: '{}'", key, value));
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value);
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value);
  return out;
}

std::vector<double> to_axis(std::string_view key, std::string_view value) {
  if (value.find(':') != std::string_view::npos) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) bad_value(key, value);
    const auto n = to_uint(key, parts[2]);
    if (n == 0) bad_value(key, value);
    return GridAxes::linspace(to_double(key, parts[0]), to_double(key, parts[1]), n);
  }
  std::vector<double> out;
  for (auto part : split(value, ',')) out.push_back(to_double(key, part));
  return out;
}

std::string join(const std::vector<double>& values) {
  return fmt::format("{}", fmt::join(values, ", "));
}

}  // namespace

double RunConfig::grid_t_max() const {
  const double ti = axes.t_i.empty() ? 0.0 : *std::max_element(axes.t_i.begin(), axes.t_i.end());
  const double dt = axes.delta_t.empty() ? 0.0 : *std::max_element(axes.delta_t.begin(), axes.delta_t.end());
  return std::max(sim.t_max, ti + dt);
}

std::string_view to_string(TrajectoryFiles mode) {
  switch (mode) {
    case TrajectoryFiles::Concatenated: return "concatenated";
    case TrajectoryFiles::PerTrajectory: return "per_trajectory";
    case TrajectoryFiles::None: return "none";
  }
  return "concatenated";
}

std::string_view to_string(FluctuationUnits units) {
  return units == FluctuationUnits::Energy ? "energy" : "sigma";
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "gamma") cfg.sim.gamma = to_double(key, value);
  else if (key == "epsilon") cfg.sim.epsilon = to_double(key, value);
  else if (key == "dt") cfg.sim.dt = to_double(key, value);
  else if (key == "t_max") cfg.sim.t_max = to_double(key, value);
  else if (key == "eta") cfg.sim.eta = to_double(key, value);
  else if (key == "n_traj") cfg.sim.n_traj = to_uint(key, value);
  else if (key == "master_seed") cfg.sim.master_seed = to_uint(key, value);
  else if (key == "record_stride") cfg.sim.record_stride = to_uint(key, value);
  else if (key == "n_workers") cfg.n_workers = to_uint(key, value);
  else if (key == "concurrence_threshold") cfg.concurrence_threshold = to_double(key, value);
  else if (key == "t_i") cfg.axes.t_i = to_axis(key, value);
  else if (key == "delta_t") cfg.axes.delta_t = to_axis(key, value);
  else if (key == "etas") {
    cfg.etas.clear();
    if (!value.empty())
      for (auto part : split(value, ',')) cfg.etas.push_back(to_double(key, part));
  } else if (key == "taus") {
    cfg.taus.clear();
    for (auto part : split(value, ',')) {
      if (part == "delta_t")
        cfg.taus.push_back(TauSpec::window());
      else
        cfg.taus.push_back(TauSpec::fixed(to_double(key, part)));
    }
  } else if (key == "units") {
    if (value == "energy") cfg.units = FluctuationUnits::Energy;
    else if (value == "sigma") cfg.units = FluctuationUnits::Sigma;
    else bad_value(key, value);
  } else if (key == "trajectory_files") {
    if (value == "concatenated") cfg.trajectory_files = TrajectoryFiles::Concatenated;
    else if (value == "per_trajectory") cfg.trajectory_files = TrajectoryFiles::PerTrajectory;
    else if (value == "none") cfg.trajectory_files = TrajectoryFiles::None;
    else bad_value(key, value);
  } else {
    throw DomainError(fmt::format("unknown config key '{}'", key));
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw DomainError(fmt::format("line {}: expected key = value", line_no));
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot read config file {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string taus;
  for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
    if (i) taus += ", ";
    taus += cfg.taus[i].tracks_window ? std::string("delta_t") : fmt::format("{}", cfg.taus[i].value);
  }
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  put("gamma", fmt::format("{}", cfg.sim.gamma));
  put("epsilon", fmt::format("{}", cfg.sim.epsilon));
  put("dt", fmt::format("{}", cfg.sim.dt));
  put("t_max", fmt::format("{}", cfg.sim.t_max));
  put("eta", fmt::format("{}", cfg.sim.eta));
  put("n_traj", fmt::format("{}", cfg.sim.n_traj));
  put("master_seed", fmt::format("{}", cfg.sim.master_seed));
  put("record_stride", fmt::format("{}", cfg.sim.record_stride));
  put("taus", taus);
  put("etas", join(cfg.etas));
  put("t_i", join(cfg.axes.t_i));
  put("delta_t", join(cfg.axes.delta_t));
  put("concurrence_threshold", fmt::format("{}", cfg.concurrence_threshold));
  put("units", std::string(to_string(cfg.units)));
  put("trajectory_files", std::string(to_string(cfg.trajectory_files)));
  put("n_workers", fmt::format("{}", cfg.n_workers));
  return out;
}

}  // namespace halfparity
