// Random valid instances for property tests.

#pragma once

#include <random>

#include <Eigen/Dense>

#include "bellrand/quantum.hpp"

namespace testing {

using bellrand::quantum::ComplexMatrixd;

inline ComplexMatrixd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  ComplexMatrixd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

inline bellrand::quantum::DensityStated random_state(std::mt19937_64& rng, Eigen::Index dim) {
  const ComplexMatrixd g = gaussian_matrix(rng, dim, dim);
  ComplexMatrixd rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (rho + rho.adjoint()).eval() / 2.0;
  return bellrand::quantum::DensityStated(rho);
}

inline ComplexMatrixd random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  Eigen::HouseholderQR<ComplexMatrixd> qr(gaussian_matrix(rng, dim, dim));
  return qr.householderQ();
}

/// Projective measurement in a random orthonormal basis.
inline bellrand::quantum::Povmd random_projective(std::mt19937_64& rng, Eigen::Index dim) {
  const ComplexMatrixd u = random_unitary(rng, dim);
  std::vector<ComplexMatrixd> e;
  for (Eigen::Index k = 0; k < dim; ++k) e.push_back(u.col(k) * u.col(k).adjoint());
  return bellrand::quantum::Povmd(std::move(e));
}

/// Two-outcome projective measurement: a random rank-r projector and its complement.
inline bellrand::quantum::Povmd random_binary_projective(std::mt19937_64& rng, Eigen::Index dim) {
  const ComplexMatrixd u = random_unitary(rng, dim);
  std::uniform_int_distribution<Eigen::Index> rank(0, dim);
  const Eigen::Index r = rank(rng);
  ComplexMatrixd p = ComplexMatrixd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < r; ++k) p += u.col(k) * u.col(k).adjoint();
  p = (p + p.adjoint()).eval() / 2.0;
  return bellrand::quantum::Povmd({p, ComplexMatrixd::Identity(dim, dim) - p});
}

/// General POVM: F_i = S^{-1/2} A_i S^{-1/2} with S = sum A_i.
inline bellrand::quantum::Povmd random_povm(std::mt19937_64& rng, Eigen::Index dim, int outcomes) {
  std::vector<ComplexMatrixd> a;
  ComplexMatrixd s = ComplexMatrixd::Zero(dim, dim);
  for (int i = 0; i < outcomes; ++i) {
    const ComplexMatrixd g = gaussian_matrix(rng, dim, dim);
    a.push_back(g * g.adjoint());
    s += a.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrixd> es(s);
  const ComplexMatrixd inv_sqrt = es.operatorInverseSqrt();
  for (auto& m : a) {
    m = inv_sqrt * m * inv_sqrt;
    m = (m + m.adjoint()).eval() / 2.0;
  }
  return bellrand::quantum::Povmd(std::move(a));
}

inline ComplexMatrixd random_hermitian(std::mt19937_64& rng, Eigen::Index dim) {
  const ComplexMatrixd g = gaussian_matrix(rng, dim, dim);
  return (g + g.adjoint()) / 2.0;
}

}  // namespace testing
