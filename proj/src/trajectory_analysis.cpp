#include "halfparity/trajectory_analysis.hpp"

#include "halfparity/error.hpp"

#include <cmath>
#include <limits>

namespace halfparity {

HeatIncrement heat_increment(const Populations& before, const Populations& after, double dW,
                             const SimulationConfig& cfg) {
  const double kick = 2.0 * cfg.epsilon * std::sqrt(cfg.gamma) * dW;
  HeatIncrement h;
  if (!cfg.mixed()) {
    h.even = 4.0 * kick * before.uu * before.dd;
    h.even_odd = kick * before.even() * before.odd();
    h.total = h.even + h.even_odd;
    return h;
  }
  const double scaled = std::sqrt(cfg.eta) * kick;
  h.even = 4.0 * scaled * before.uu * before.dd;
  h.even_odd = scaled * before.even() * before.odd();
  h.total = cfg.epsilon * (after.phi() - before.phi());
  return h;
}

HeatSeries heat_increments(const TrajectoryRecord& record, const SimulationConfig& cfg) {
  if (record.stride != 1)
    throw DomainError("heat increments need every step; record_stride must be 1");
  if (record.samples.size() < 2) throw DomainError("record has no steps");
  const std::size_t n = record.samples.size() - 1;
  const double scale = 2.0 * cfg.epsilon * std::sqrt(cfg.gamma * record.dt);

  HeatSeries s;
  s.dt = record.dt;
  s.increment.resize(n);
  s.even.resize(n);
  s.even_odd.resize(n);
  s.normalized.resize(n);
  s.cumulative.assign(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& from = record.samples[j];
    const auto& to = record.samples[j + 1];
    const HeatIncrement h = heat_increment(from.populations, to.populations, to.wiener, cfg);
    s.increment[j] = h.total;
    s.even[j] = h.even;
    s.even_odd[j] = h.even_odd;
    s.normalized[j] = h.total / scale;
    s.cumulative[j + 1] = s.cumulative[j] + h.total;
  }
  return s;
}

double coarse_grained_fluctuation(const HeatSeries& series, double t, double tau,
                                  const SimulationConfig& /*cfg*/) {
  if (!(t >= 0.0)) throw DomainError("window start must be >= 0");
  if (!(tau > 0.0)) throw DomainError("coarse-graining time must be positive");
  const std::size_t n = series.n_steps();
  const auto first = static_cast<std::size_t>(std::llround(t / series.dt));
  const auto width = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tau / series.dt)));
  if (first >= n) throw DomainError("coarse-graining window is empty");
  const std::size_t last = std::min(n, first + width);
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) sum += series.normalized[k] * series.normalized[k];
  return std::sqrt(sum / static_cast<double>(last - first));
}

std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Odd: return "odd";
    case OutcomeClass::EvenPlus: return "even_plus";
    case OutcomeClass::EvenMinus: return "even_minus";
  }
  return "unknown";
}

OutcomeClass outcome_class_from_string(std::string_view name) {
  if (name == "odd") return OutcomeClass::Odd;
  if (name == "even_plus") return OutcomeClass::EvenPlus;
  if (name == "even_minus") return OutcomeClass::EvenMinus;
  throw DomainError("unknown outcome class: " + std::string(name));
}

OutcomeClass classify_outcome(double J) {
  if (J >= 0.5) return OutcomeClass::EvenPlus;
  if (J <= -0.5) return OutcomeClass::EvenMinus;
  return OutcomeClass::Odd;
}

OutcomeClass classify_trajectory(const TrajectoryRecord& record, double t_classify, double gamma) {
  if (gamma * t_classify < 6.0 - 1e-9)
    throw DomainError("classification needs Gamma t >= 6");
  return classify_outcome(integrated_outcome(record, t_classify));
}

void SummaryAccumulator::Sums::add(const TrajectoryRecord& record) {
  const std::size_t n = record.samples.size();
  if (c.empty()) {
    c.assign(n, 0.0);
    c2.assign(n, 0.0);
    q.assign(n, 0.0);
    q2.assign(n, 0.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = record.samples[k].concurrence;
    const double qk = record.samples[k].heat;
    c[k] += ck;
    c2[k] += ck * ck;
    q[k] += qk;
    q2[k] += qk * qk;
  }
  ++count;
}

void SummaryAccumulator::add(const TrajectoryRecord& record, const OutcomeClass* outcome) {
  if (times_.empty()) {
    times_.reserve(record.samples.size());
    for (const auto& s : record.samples) times_.push_back(s.t);
  } else if (times_.size() != record.samples.size()) {
    throw DomainError("records in one summary must share the sample grid");
  }
  all_.add(record);
  if (outcome)
    classes_[static_cast<int>(*outcome)].add(record);
  else
    classified_ = false;
}

namespace {

ClassSeries finish_series(std::size_t count, const std::vector<double>& s, const std::vector<double>& s2,
                          const std::vector<double>& q, const std::vector<double>& q2, std::size_t rows) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  ClassSeries out;
  out.count = count;
  out.mean_C.assign(rows, nan);
  out.mean_Q.assign(rows, nan);
  out.sem_C.assign(rows, nan);
  out.sem_Q.assign(rows, nan);
  if (count == 0) return out;
  const double n = static_cast<double>(count);
  auto sem = [n](double sum, double sum2) {
    if (n < 2.0) return nan;
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
  };
  for (std::size_t k = 0; k < rows; ++k) {
    out.mean_C[k] = s[k] / n;
    out.mean_Q[k] = q[k] / n;
    out.sem_C[k] = sem(s[k], s2[k]);
    out.sem_Q[k] = sem(q[k], q2[k]);
  }
  return out;
}

}  // namespace

EnsembleSummary SummaryAccumulator::finish() const {
  EnsembleSummary out;
  out.times = times_;
  const std::size_t rows = times_.size();
  out.all = finish_series(all_.count, all_.c, all_.c2, all_.q, all_.q2, rows);
  out.classified = classified_ && all_.count > 0;
  if (!out.classified) {
    out.warnings.push_back("trajectories were not classified; only unconditional averages are available");
    return out;
  }
  for (int i = 0; i < 3; ++i) {
    const Sums& s = classes_[i];
    out.classes[i] = finish_series(s.count, s.c, s.c2, s.q, s.q2, rows);
    if (s.count == 0)
      out.warnings.push_back("outcome class " + std::string(to_string(static_cast<OutcomeClass>(i))) +
                             " is empty");
  }
  return out;
}

EnsembleSummary postselected_averages(std::span<const TrajectoryRecord> ensemble, double gamma) {
  SummaryAccumulator acc;
  for (const auto& record : ensemble) {
    const double t_end = record.final_sample().t;
    if (gamma * t_end >= 6.0 - 1e-9) {
      const OutcomeClass c = classify_outcome(record.final_sample().outcome);
      acc.add(record, &c);
    } else {
      acc.add(record, nullptr);
    }
  }
  EnsembleSummary out = acc.finish();
  if (ensemble.empty()) out.warnings.push_back("empty ensemble");
  return out;
}

}  // namespace halfparity
