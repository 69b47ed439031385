#include "halfparity/quantum_core.hpp"

#include "halfparity/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace halfparity {

PureState::PureState() : amplitudes_(Amplitudes::Zero()) { amplitudes_[kUpUp] = 1.0; }

PureState::PureState(const Amplitudes& amplitudes) : amplitudes_(amplitudes) {}

PureState PureState::basis(BasisIndex index) {
  Amplitudes a = Amplitudes::Zero();
  a[index] = 1.0;
  return PureState(a);
}

PureState PureState::initial() { return PureState(Amplitudes::Constant(0.5)); }

PureState PureState::odd_bell() {
  Amplitudes a = Amplitudes::Zero();
  a[kUpDown] = a[kDownUp] = 1.0 / std::sqrt(2.0);
  return PureState(a);
}

PureState PureState::product(Complex alpha1, Complex beta1, Complex alpha2, Complex beta2) {
  Amplitudes a;
  a << alpha1 * alpha2, alpha1 * beta2, beta1 * alpha2, beta1 * beta2;
  PureState psi(a);
  psi.normalize();
  return psi;
}

void PureState::normalize() {
  const double n = amplitudes_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite state");
  amplitudes_ /= n;
}

DensityMatrix::DensityMatrix() : DensityMatrix(from_pure(PureState::initial())) {}

DensityMatrix::DensityMatrix(const Matrix4c& rho) : rho_(rho) {}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Matrix4c::Identity() * 0.25); }

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix4c h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver did not converge");
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::normalize_trace() {
  const double tr = trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw DomainError("density matrix has non-positive trace");
  rho_ /= tr;
}

Eigen::Vector4d phi_diagonal() { return Eigen::Vector4d(1.0, 0.0, 0.0, -1.0); }

Matrix4c phi_operator() { return phi_diagonal().cast<Complex>().asDiagonal(); }

Matrix4c hamiltonian(double epsilon) { return epsilon * phi_operator(); }

Populations populations(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return {std::norm(a[kUpUp]), std::norm(a[kUpDown]), std::norm(a[kDownUp]), std::norm(a[kDownDown])};
}

Populations populations(const DensityMatrix& rho) {
  return {rho(kUpUp, kUpUp).real(), rho(kUpDown, kUpDown).real(), rho(kDownUp, kDownUp).real(),
          rho(kDownDown, kDownDown).real()};
}

double phi_expectation(const PureState& psi) { return populations(psi).phi(); }
double phi_expectation(const DensityMatrix& rho) { return populations(rho).phi(); }

double internal_energy(const PureState& psi, double epsilon) { return epsilon * phi_expectation(psi); }
double internal_energy(const DensityMatrix& rho, double epsilon) { return epsilon * phi_expectation(rho); }

double concurrence_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return std::max(0.0, 2.0 * std::abs(a[kUpUp] * a[kDownDown] - a[kUpDown] * a[kDownUp]));
}

namespace {

Matrix4c spin_flip() {
  Matrix4c s = Matrix4c::Zero();
  s(0, 3) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 0) = -1.0;
  return s;
}

}  // namespace

double concurrence_wootters(const DensityMatrix& rho) {
  static const Matrix4c flip = spin_flip();
  // The lambda_i are the singular values of V^T (sy x sy) V with
  // rho = V V^+ (V = eigenvectors scaled by sqrt(eigenvalues)). Same numbers as
  // the square roots of eig(rho rho~) without amplifying round-off near zero.
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho.matrix());
  if (eig.info() != Eigen::Success) throw NumericalError("Wootters eigensolver did not converge");
  const Eigen::Vector4d weights = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix4c v = eig.eigenvectors() * weights.cast<Complex>().asDiagonal();
  const Matrix4c tau = v.transpose() * flip * v;
  Eigen::JacobiSVD<Matrix4c> svd(tau);
  const Eigen::Vector4d lambda = svd.singularValues();  // decreasing
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double fidelity(const PureState& a, const PureState& b) {
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const Matrix4c diff = a.matrix() - b.matrix();
  const Matrix4c h = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver did not converge");
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace halfparity
