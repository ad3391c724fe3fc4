// Finite-dimensional quantum mechanics on dense Eigen matrices: density
// states, POVMs, Kraus sets, Born-rule probabilities, post-measurement
// states and uncertainty products.
//
// Every type is templated on the real scalar; `d` suffixed aliases fix it to
// double, which is what the rest of the library uses.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "bellrand/common.hpp"

namespace bellrand::quantum {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
bool is_finite(const ComplexMatrix<Scalar>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto& z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

template <typename Scalar>
bool is_hermitian(const ComplexMatrix<Scalar>& m,
                  Scalar tol = Scalar(kTolerance)) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Smallest eigenvalue of the Hermitian part; full decomposition so that
// rank-deficient operators are handled without pivoting tricks.
template <typename Scalar>
Scalar min_eigenvalue(const ComplexMatrix<Scalar>& m) {
  const ComplexMatrix<Scalar> h = (m + m.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(
      h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename Scalar>
bool is_psd(const ComplexMatrix<Scalar>& m, Scalar tol = Scalar(kTolerance)) {
  return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol;
}

template <typename Scalar>
void require_square(const ComplexMatrix<Scalar>& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": matrix must be square, dim >= 1");
  if (!is_finite(m)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

/// Kronecker product a (x) b.
template <typename Derived, typename OtherDerived>
auto tensor_product(const Eigen::MatrixBase<Derived>& a,
                    const Eigen::MatrixBase<OtherDerived>& b) {
  using Plain = typename Derived::PlainObject;
  Plain out = Eigen::kroneckerProduct(a.derived(), b.derived()).eval();
  return out;
}

/// |psi><psi| for an arbitrary (not necessarily normalized) vector.
template <typename Scalar>
ComplexMatrix<Scalar> projector(const ComplexVector<Scalar>& psi) {
  const Scalar norm = psi.norm();
  if (!(norm > Scalar(0))) throw InvalidArgument("projector: zero vector");
  const ComplexVector<Scalar> unit = psi / norm;
  return unit * unit.adjoint();
}

template <typename Scalar>
ComplexMatrix<Scalar> basis_projector(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw DimensionError("basis_projector: index out of range");
  ComplexMatrix<Scalar> p = ComplexMatrix<Scalar>::Zero(dim, dim);
  p(k, k) = Scalar(1);
  return p;
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
template <typename Scalar>
class DensityState {
 public:
  using Matrix = ComplexMatrix<Scalar>;

  explicit DensityState(Matrix rho) : rho_(std::move(rho)) {
    require_square(rho_, "DensityState");
    if (!is_hermitian(rho_)) throw InvalidArgument("DensityState: not Hermitian");
    if (std::abs(rho_.trace() - Complex<Scalar>(1)) > Scalar(kTolerance))
      throw InvalidArgument("DensityState: trace != 1");
    if (min_eigenvalue(rho_) < -Scalar(kTolerance))
      throw InvalidArgument("DensityState: negative eigenvalue");
  }

  static DensityState pure(const ComplexVector<Scalar>& psi) {
    return DensityState(projector(psi));
  }

  static DensityState maximally_mixed(Eigen::Index dim) {
    return DensityState(Matrix::Identity(dim, dim) / Scalar(dim));
  }

  static DensityState basis(Eigen::Index dim, Eigen::Index k) {
    return DensityState(basis_projector<Scalar>(dim, k));
  }

  // lambda * a + (1 - lambda) * b
  static DensityState mixture(Scalar lambda, const DensityState& a,
                              const DensityState& b) {
    if (lambda < Scalar(0) || lambda > Scalar(1))
      throw InvalidArgument("DensityState::mixture: weight outside [0,1]");
    if (a.dim() != b.dim()) throw DimensionError("DensityState::mixture: dims differ");
    return DensityState(lambda * a.rho_ + (Scalar(1) - lambda) * b.rho_);
  }

  const Matrix& matrix() const noexcept { return rho_; }
  Eigen::Index dim() const noexcept { return rho_.rows(); }
  Scalar purity() const { return (rho_ * rho_).trace().real(); }

  // Tr(rho O)
  Complex<Scalar> expectation(const Matrix& op) const {
    if (op.rows() != dim() || op.cols() != dim())
      throw DimensionError("DensityState::expectation: dimension mismatch");
    return (rho_ * op).trace();
  }

 private:
  Matrix rho_;
};

template <typename Scalar>
DensityState<Scalar> tensor_product(const DensityState<Scalar>& a,
                                    const DensityState<Scalar>& b) {
  return DensityState<Scalar>(tensor_product(a.matrix(), b.matrix()));
}

/// Positive operator-valued measure: PSD elements summing to the identity.
template <typename Scalar>
class Povm {
 public:
  using Matrix = ComplexMatrix<Scalar>;

  explicit Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw InvalidArgument("Povm: no elements");
    const Eigen::Index dim = elements_.front().rows();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& e : elements_) {
      require_square(e, "Povm");
      if (e.rows() != dim) throw DimensionError("Povm: elements differ in dimension");
      if (!is_psd(e)) throw InvalidArgument("Povm: element not Hermitian PSD");
      sum += e;
    }
    if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > Scalar(kTolerance))
      throw InvalidArgument("Povm: elements do not sum to identity");
  }

  /// Projective measurement in the computational basis.
  static Povm computational(Eigen::Index dim) {
    std::vector<Matrix> e;
    for (Eigen::Index k = 0; k < dim; ++k) e.push_back(basis_projector<Scalar>(dim, k));
    return Povm(std::move(e));
  }

  /// Two-outcome projective measurement of a +/-1 valued observable.
  /// Outcome 0 is the +1 eigenspace, outcome 1 the -1 eigenspace.
  static Povm from_binary_observable(const Matrix& a) {
    require_square(a, "Povm::from_binary_observable");
    const Matrix id = Matrix::Identity(a.rows(), a.cols());
    if (!is_hermitian(a) || (a * a - id).cwiseAbs().maxCoeff() > Scalar(kTolerance))
      throw InvalidArgument("Povm::from_binary_observable: observable must square to I");
    return Povm({(id + a) / Scalar(2), (id - a) / Scalar(2)});
  }

  const std::vector<Matrix>& elements() const noexcept { return elements_; }
  const Matrix& operator[](std::size_t i) const { return elements_.at(i); }
  std::size_t size() const noexcept { return elements_.size(); }
  Eigen::Index dim() const noexcept { return elements_.front().rows(); }

  bool is_projective(Scalar tol = Scalar(kTolerance)) const {
    for (const auto& e : elements_)
      if ((e * e - e).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  }

 private:
  std::vector<Matrix> elements_;
};

/// Measurement operators M_i with sum_i M_i^dagger M_i = I.
template <typename Scalar>
class KrausSet {
 public:
  using Matrix = ComplexMatrix<Scalar>;

  explicit KrausSet(std::vector<Matrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw InvalidArgument("KrausSet: no operators");
    const Eigen::Index dim = ops_.front().rows();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& m : ops_) {
      require_square(m, "KrausSet");
      if (m.rows() != dim) throw DimensionError("KrausSet: operators differ in dimension");
      sum += m.adjoint() * m;
    }
    if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > Scalar(kTolerance))
      throw InvalidArgument("KrausSet: sum M^dagger M != identity");
  }

  // Projective POVMs are their own Kraus operators.
  static KrausSet from_projective(const Povm<Scalar>& povm) {
    if (!povm.is_projective())
      throw InvalidArgument("KrausSet::from_projective: POVM is not projective");
    return KrausSet(povm.elements());
  }

  /// The induced POVM F_i = M_i^dagger M_i.
  Povm<Scalar> povm() const {
    std::vector<Matrix> f;
    f.reserve(ops_.size());
    for (const auto& m : ops_) f.push_back(m.adjoint() * m);
    return Povm<Scalar>(std::move(f));
  }

  const std::vector<Matrix>& operators() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }
  Eigen::Index dim() const noexcept { return ops_.front().rows(); }

 private:
  std::vector<Matrix> ops_;
};

/// p_i = Tr(rho F_i), clamped to [0, 1].
template <typename Scalar>
RealVector<Scalar> born_probabilities(const DensityState<Scalar>& state,
                                      const Povm<Scalar>& povm) {
  if (state.dim() != povm.dim())
    throw DimensionError("born_probabilities: state and POVM dimensions differ");
  RealVector<Scalar> p(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    // Tr(rho F) without forming the product.
    const Scalar v = (state.matrix().transpose().cwiseProduct(povm[i])).sum().real();
    p(static_cast<Eigen::Index>(i)) = std::clamp(v, Scalar(0), Scalar(1));
  }
  return p;
}

/// M rho M^dagger / Tr(M rho M^dagger) for the given outcome.
template <typename Scalar>
DensityState<Scalar> post_measurement_state(const DensityState<Scalar>& state,
                                            const KrausSet<Scalar>& kraus,
                                            std::size_t outcome) {
  if (state.dim() != kraus.dim())
    throw DimensionError("post_measurement_state: dimension mismatch");
  if (outcome >= kraus.size())
    throw InvalidArgument("post_measurement_state: outcome index out of range");
  const auto& m = kraus.operators()[outcome];
  ComplexMatrix<Scalar> unnormalized = m * state.matrix() * m.adjoint();
  const Scalar p = unnormalized.trace().real();
  if (!(p > Scalar(1e-12)))
    throw ImpossibleOutcome("post_measurement_state: impossible outcome (p <= 1e-12)");
  unnormalized /= p;
  // Restore exact Hermiticity lost to rounding.
  unnormalized = (unnormalized + unnormalized.adjoint()).eval() / Scalar(2);
  return DensityState<Scalar>(std::move(unnormalized));
}

template <typename Scalar>
struct UncertaintyProduct {
  Scalar lhs;  // variance(X) * variance(Y)
  Scalar rhs;  // |Tr rho [X, Y]|^2 / 4
};

/// Both sides of the Robertson relation for Hermitian X and Y.
template <typename Scalar>
UncertaintyProduct<Scalar> uncertainty_check(const DensityState<Scalar>& state,
                                             const ComplexMatrix<Scalar>& x,
                                             const ComplexMatrix<Scalar>& y) {
  require_square(x, "uncertainty_check");
  require_square(y, "uncertainty_check");
  if (x.rows() != state.dim() || y.rows() != state.dim())
    throw DimensionError("uncertainty_check: dimension mismatch");
  if (!is_hermitian(x) || !is_hermitian(y))
    throw InvalidArgument("uncertainty_check: observables must be Hermitian");
  const auto variance = [&](const ComplexMatrix<Scalar>& o) {
    const Scalar mean = state.expectation(o).real();
    return state.expectation(o * o).real() - mean * mean;
  };
  const ComplexMatrix<Scalar> commutator = x * y - y * x;
  const Scalar c = std::abs(state.expectation(commutator));
  return {variance(x) * variance(y), c * c / Scalar(4)};
}

namespace pauli {

template <typename Scalar>
ComplexMatrix<Scalar> x() {
  ComplexMatrix<Scalar> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar>
ComplexMatrix<Scalar> y() {
  ComplexMatrix<Scalar> m(2, 2);
  m << Complex<Scalar>(0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1),
      Complex<Scalar>(0);
  return m;
}

template <typename Scalar>
ComplexMatrix<Scalar> z() {
  ComplexMatrix<Scalar> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

/// (|00> + |11>) / sqrt(2).
template <typename Scalar>
DensityState<Scalar> phi_plus() {
  ComplexVector<Scalar> psi = ComplexVector<Scalar>::Zero(4);
  psi(0) = psi(3) = Scalar(1) / std::sqrt(Scalar(2));
  return DensityState<Scalar>::pure(psi);
}

/// v |phi+><phi+| + (1 - v) I/4.
template <typename Scalar>
DensityState<Scalar> werner(Scalar visibility) {
  return DensityState<Scalar>::mixture(visibility, phi_plus<Scalar>(),
                                       DensityState<Scalar>::maximally_mixed(4));
}

using ComplexMatrixd = ComplexMatrix<double>;
using ComplexVectord = ComplexVector<double>;
using DensityStated = DensityState<double>;
using Povmd = Povm<double>;
using KrausSetd = KrausSet<double>;

}  // namespace bellrand::quantum
