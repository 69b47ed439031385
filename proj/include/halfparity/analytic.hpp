#pragma once

// Closed-form solution of the ideal (eta = 1) half-parity trajectory as a
// function of the integrated outcome J and time t, plus the derived heat,
// fluctuation and entanglement-rate expressions. These are the oracles the
// stochastic engine is checked against.
//
// Every expression is written in terms of E = exp(-2 Gamma t) cosh(4 Gamma J t)
// and D = 1 + E. When |4 Gamma J t| exceeds kLogSpaceThreshold the ratios
// 1/D and E/D are evaluated from log E instead of E itself.

#include "halfparity/quantum_core.hpp"

namespace halfparity {

inline constexpr double kLogSpaceThreshold = 300.0;

struct ClosedFormPoint {
  double J = 0.0;
  double t = 0.0;
  double gamma = 1.0;
  double epsilon = 1.0;

  /// Throws DomainError unless t >= 0, gamma > 0, epsilon > 0 and J finite.
  void validate() const;
};

/// N = sqrt((1 + E) / 2)
double norm_factor(const ClosedFormPoint& p);

/// Amplitudes (e^{(-i eps + 2 Gamma J) t - Gamma t}/2, 1/2, 1/2, e^{(i eps - 2 Gamma J) t - Gamma t}/2) / N.
PureState state_closed(const ClosedFormPoint& p);

/// (1 - e^{-2 Gamma t}) / D
double concurrence_closed(const ClosedFormPoint& p);

/// epsilon e^{-2 Gamma t} sinh(4 Gamma J t) / D
double heat_closed(const ClosedFormPoint& p);

/// Dimensionless standard deviation of the heat increment:
/// (e^{-4 Gamma t} + E) / D^2 = 4 p_uu p_dd + p_e p_o.
double sigma_tilde(const ClosedFormPoint& p);

/// Even/odd-coherence part of sigma_tilde: E / D^2 = p_e p_o.
double sigma_eo_tilde(const ClosedFormPoint& p);

/// Concurrence derivative averaged over the next dt with the past record fixed.
double dC_dt_ensemble(const ClosedFormPoint& p);

struct RateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = 2 Gamma (sigma~ - 2 Q~^2 C), upper = 2 Gamma (2 sigma~ - 2 Q~^2 C).
RateBounds bounds(const ClosedFormPoint& p);

/// dC_dt_ensemble(J=0, t) - 4 Gamma sigma_eo_tilde(J=0, t); identically zero.
double long_time_equality_residual(double t, double gamma);

/// Mixture weights of the three outcome peaks at J = -1, 0, +1.
struct OutcomeWeights {
  double minus = 0.25;
  double zero = 0.5;
  double plus = 0.25;
};

/// Sum_j w_j Normal(J; j, 1/(4 Gamma t)). Rejects t <= 0 and weights not summing to 1.
double outcome_pdf(double J, double t, double gamma, const OutcomeWeights& weights = {});

/// Cumulative distribution matching outcome_pdf.
double outcome_cdf(double J, double t, double gamma, const OutcomeWeights& weights = {});

}  // namespace halfparity
