#pragma once

// Heat bookkeeping along a trajectory, outcome classes, and post-selected
// ensemble averages.

#include "halfparity/sde_engine.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace halfparity {

struct HeatIncrement {
  double total = 0.0;
  double even = 0.0;
  double even_odd = 0.0;
};

/// Heat exchanged during one step from the pre-step populations.
///
/// eta = 1: dQ = 2 eps sqrt(Gamma) dW (4 p_uu p_dd + p_e p_o), split into
///   dQ^(e) = 8 eps sqrt(Gamma) dW p_uu p_dd and dQ^(eo) = 2 eps sqrt(Gamma) dW p_e p_o.
/// eta < 1: dQ = U_after - U_before (trace of drho H); the split carries sqrt(eta).
HeatIncrement heat_increment(const Populations& before, const Populations& after, double dW,
                             const SimulationConfig& cfg);

/// Per-step heat along one trajectory. Step j covers [t_j, t_{j+1}];
/// cumulative has one more entry than the step series (Q at t_0 = 0).
struct HeatSeries {
  double dt = 0.0;
  std::vector<double> increment;
  std::vector<double> even;
  std::vector<double> even_odd;
  std::vector<double> cumulative;
  /// dQ / (2 eps sqrt(Gamma dt))
  std::vector<double> normalized;

  std::size_t n_steps() const { return increment.size(); }
};

/// Rebuilds the heat series from stored populations and Wiener increments.
/// Throws DomainError if the record was subsampled (stride > 1).
HeatSeries heat_increments(const TrajectoryRecord& record, const SimulationConfig& cfg);

/// sqrt(mean of normalized dQ~^2 over the steps in [t, t + tau]), the window
/// cut at the end of the series. Throws DomainError on an empty window.
double coarse_grained_fluctuation(const HeatSeries& series, double t, double tau,
                                  const SimulationConfig& cfg);

enum class OutcomeClass { Odd = 0, EvenPlus = 1, EvenMinus = 2 };

std::string_view to_string(OutcomeClass c);
/// Accepts "odd", "even_plus", "even_minus".
OutcomeClass outcome_class_from_string(std::string_view name);

/// |J| < 0.5 -> Odd, J >= 0.5 -> EvenPlus, J <= -0.5 -> EvenMinus.
OutcomeClass classify_outcome(double J);

/// Classifies by J(t_classify). Requires Gamma t_classify >= 6.
OutcomeClass classify_trajectory(const TrajectoryRecord& record, double t_classify, double gamma);

struct ClassSeries {
  std::size_t count = 0;
  std::vector<double> mean_C;
  std::vector<double> mean_Q;
  std::vector<double> sem_C;
  std::vector<double> sem_Q;
};

struct EnsembleSummary {
  std::vector<double> times;
  bool classified = false;
  std::array<ClassSeries, 3> classes;  // indexed by OutcomeClass
  ClassSeries all;
  std::vector<std::string> warnings;

  const ClassSeries& of(OutcomeClass c) const { return classes[static_cast<int>(c)]; }
};

/// Running sums for post-selected averages. Records must share the sample
/// grid; add() them in trajectory-index order for reproducible output.
class SummaryAccumulator {
 public:
  void add(const TrajectoryRecord& record, const OutcomeClass* outcome);
  EnsembleSummary finish() const;

 private:
  struct Sums {
    std::size_t count = 0;
    std::vector<double> c, c2, q, q2;
    void add(const TrajectoryRecord& record);
  };

  std::vector<double> times_;
  bool classified_ = true;
  std::array<Sums, 3> classes_;
  Sums all_;
};

/// Per-class and unconditional means of C(t) and Q(t). Classes are assigned at
/// the final stored time; if Gamma t_max < 6 only the unconditional series is
/// filled and a warning is recorded.
EnsembleSummary postselected_averages(std::span<const TrajectoryRecord> ensemble, double gamma);

}  // namespace halfparity
