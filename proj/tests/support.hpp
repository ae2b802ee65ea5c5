#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "loewner/characterizations.hpp"
#include "loewner/linalg.hpp"
#include "loewner/random.hpp"

namespace loewner::testing {

/// Random Hermitian matrix with Gaussian entries.
inline HermitianMatrix gaussian_hermitian(Eigen::Index n, Rng& rng) {
  CMatrix g = random_gaussian(n, n, rng);
  return HermitianMatrix(CMatrix(0.5 * (g + g.adjoint())));
}

/// Eigenvalues from Eigen's own solver, independent of the Jacobi code.
inline Eigen::VectorXd reference_eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  return es.eigenvalues();
}

/// f(A) from Eigen's eigendecomposition.
template <class F>
CMatrix reference_function(const HermitianMatrix& a, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  Eigen::VectorXd v = es.eigenvalues();
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f(v(i));
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double rel_diff(const CMatrix& x, const CMatrix& y) {
  return (x - y).norm() / std::max(1.0, y.norm());
}

}  // namespace loewner::testing
