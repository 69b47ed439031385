#include "halfparity/analytic.hpp"

#include "halfparity/error.hpp"

#include <cmath>
#include <numbers>

namespace halfparity {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct Terms {
  double decay2 = 1.0;    // e^{-2 Gamma t}
  double decay4 = 1.0;    // e^{-4 Gamma t}
  double inv_d = 0.5;     // 1 / D
  double e_over_d = 0.5;  // E / D
  double log1p_e = 0.0;   // log D
  double tanh_x = 0.0;
};

Terms terms(const ClosedFormPoint& p) {
  p.validate();
  const double gt = p.gamma * p.t;
  const double x = 4.0 * p.gamma * p.J * p.t;
  Terms r;
  r.decay2 = std::exp(-2.0 * gt);
  r.decay4 = std::exp(-4.0 * gt);
  r.tanh_x = std::tanh(x);
  if (std::abs(x) <= kLogSpaceThreshold) {
    const double e = r.decay2 * std::cosh(x);
    r.inv_d = 1.0 / (1.0 + e);
    r.e_over_d = e * r.inv_d;
    r.log1p_e = std::log1p(e);
  } else {
    const double ax = std::abs(x);
    const double log_e = -2.0 * gt + ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
    const double sp = softplus(log_e);
    r.inv_d = std::exp(-sp);
    r.e_over_d = std::exp(log_e - sp);
    r.log1p_e = sp;
  }
  return r;
}

}  // namespace

void ClosedFormPoint::validate() const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("closed form requires finite t >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("closed form requires gamma > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("closed form requires epsilon > 0");
  if (!std::isfinite(J)) throw DomainError("closed form requires a finite J");
}

double norm_factor(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  return std::exp(0.5 * (r.log1p_e - std::numbers::ln2));
}

PureState state_closed(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  const double log_n = 0.5 * (r.log1p_e - std::numbers::ln2);
  const double gt = p.gamma * p.t;
  const double drift = 2.0 * p.gamma * p.J * p.t;
  const double phase = p.epsilon * p.t;
  const double odd = std::exp(-log_n - std::numbers::ln2);
  Amplitudes a;
  a[kUpUp] = std::exp(drift - gt - log_n - std::numbers::ln2) * std::polar(1.0, -phase);
  a[kUpDown] = odd;
  a[kDownUp] = odd;
  a[kDownDown] = std::exp(-drift - gt - log_n - std::numbers::ln2) * std::polar(1.0, phase);
  return PureState(a);
}

double concurrence_closed(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  return -std::expm1(-2.0 * p.gamma * p.t) * r.inv_d;
}

double heat_closed(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  return p.epsilon * r.e_over_d * r.tanh_x;
}

double sigma_tilde(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  return r.decay4 * r.inv_d * r.inv_d + r.e_over_d * r.inv_d;
}

double sigma_eo_tilde(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  return r.e_over_d * r.inv_d;
}

double dC_dt_ensemble(const ClosedFormPoint& p) {
  const Terms r = terms(p);
  const double first = 2.0 * p.gamma * (r.decay2 * r.inv_d * r.inv_d + r.e_over_d * r.inv_d);
  const double heat = heat_closed(p) / p.epsilon;
  const double c = concurrence_closed(p);
  const double phi = phi_expectation(state_closed(p));
  return first - 4.0 * p.gamma * heat * c * phi;
}

RateBounds bounds(const ClosedFormPoint& p) {
  const double s = sigma_tilde(p);
  const double q = heat_closed(p) / p.epsilon;
  const double c = concurrence_closed(p);
  return {2.0 * p.gamma * (s - 2.0 * q * q * c), 2.0 * p.gamma * (2.0 * s - 2.0 * q * q * c)};
}

double long_time_equality_residual(double t, double gamma) {
  const ClosedFormPoint p{0.0, t, gamma, 1.0};
  return dC_dt_ensemble(p) - 4.0 * gamma * sigma_eo_tilde(p);
}

namespace {

void check_outcome_args(double J, double t, double gamma, const OutcomeWeights& w) {
  if (!(t > 0.0)) throw DomainError("outcome distribution is undefined at t <= 0");
  if (!(gamma > 0.0)) throw DomainError("outcome distribution requires gamma > 0");
  if (!std::isfinite(J)) throw DomainError("outcome distribution requires a finite J");
  if (w.minus < 0.0 || w.zero < 0.0 || w.plus < 0.0 ||
      std::abs(w.minus + w.zero + w.plus - 1.0) > 1e-12)
    throw DomainError("outcome weights must be non-negative and sum to 1");
}

}  // namespace

double outcome_pdf(double J, double t, double gamma, const OutcomeWeights& w) {
  check_outcome_args(J, t, gamma, w);
  const double var = 1.0 / (4.0 * gamma * t);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  auto peak = [&](double center) { return norm * std::exp(-(J - center) * (J - center) / (2.0 * var)); };
  return w.minus * peak(-1.0) + w.zero * peak(0.0) + w.plus * peak(1.0);
}

double outcome_cdf(double J, double t, double gamma, const OutcomeWeights& w) {
  check_outcome_args(J, t, gamma, w);
  const double scale = std::sqrt(2.0 / (4.0 * gamma * t));
  auto step = [&](double center) { return 0.5 * std::erfc(-(J - center) / scale); };
  return w.minus * step(-1.0) + w.zero * step(0.0) + w.plus * step(1.0);
}

}  // namespace halfparity
