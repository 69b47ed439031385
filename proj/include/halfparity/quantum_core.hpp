#pragma once

// Two-qubit states and the observables of the half-parity setup.
//
// Basis order is |uu>, |ud>, |du>, |dd>. The measured operator is
// Phi = |uu><uu| - |dd><dd| (eigenvalues +1, 0, 0, -1) and H_S = epsilon * Phi,
// so both are diagonal in this basis and commute.

#include <Eigen/Dense>

#include <complex>

namespace halfparity {

using Complex = std::complex<double>;
using Amplitudes = Eigen::Vector4cd;
using Matrix4c = Eigen::Matrix4cd;

enum BasisIndex : int { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

class PureState {
 public:
  /// |uu>
  PureState();
  /// Stores the amplitudes as given; call normalize() if needed.
  explicit PureState(const Amplitudes& amplitudes);

  static PureState basis(BasisIndex index);
  /// (|u> + |d>)(|u> + |d>)/2, the separable starting state of every trajectory.
  static PureState initial();
  /// (|ud> + |du>)/sqrt(2)
  static PureState odd_bell();
  /// Product of two single-qubit states (alpha|u> + beta|d>) each, normalized.
  static PureState product(Complex alpha1, Complex beta1, Complex alpha2, Complex beta2);

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }
  void normalize();

 private:
  Amplitudes amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix();
  explicit DensityMatrix(const Matrix4c& rho);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  const Matrix4c& matrix() const { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

  double trace() const { return rho_.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Rescales to unit trace.
  void normalize_trace();

 private:
  Matrix4c rho_;
};

struct Populations {
  double uu = 0.0;
  double ud = 0.0;
  double du = 0.0;
  double dd = 0.0;

  double even() const { return uu + dd; }
  double odd() const { return ud + du; }
  double sum() const { return uu + ud + du + dd; }
  /// <Phi> = p_uu - p_dd
  double phi() const { return uu - dd; }
};

/// Diagonal of Phi in the computational basis: (1, 0, 0, -1).
Eigen::Vector4d phi_diagonal();
Matrix4c phi_operator();
Matrix4c hamiltonian(double epsilon);

Populations populations(const PureState& psi);
Populations populations(const DensityMatrix& rho);

double phi_expectation(const PureState& psi);
double phi_expectation(const DensityMatrix& rho);

/// U = epsilon * <Phi>; the initial state has U = 0.
double internal_energy(const PureState& psi, double epsilon);
double internal_energy(const DensityMatrix& rho, double epsilon);

/// max{0, 2|ad - bc|}
double concurrence_pure(const PureState& psi);

/// Wootters concurrence max{0, l1 - l2 - l3 - l4}, l_i the decreasing square
/// roots of the eigenvalues of rho (sy x sy) rho^* (sy x sy), obtained as singular
/// values. Throws NumericalError if the eigensolver fails.
double concurrence_wootters(const DensityMatrix& rho);

/// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

/// Half the trace norm of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace halfparity
