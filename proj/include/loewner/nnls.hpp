#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/linalg.hpp"

namespace loewner {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
};

namespace detail {

// Least squares on the columns in `cols` via the normal equations, solved by
// the symmetric Jacobi eigensolver with a pseudo-inverse cutoff, followed by
// two rounds of iterative refinement on the true residual.
inline Eigen::VectorXd passive_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             const std::vector<Eigen::Index>& cols) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd sub(a.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = a.col(cols[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd gram = sub.transpose() * sub;
  auto [mu, v] = eigh_real(gram);
  const double cutoff = mu(k - 1) * 1e-15 * static_cast<double>(k);
  Eigen::VectorXd inv(k);
  for (Eigen::Index i = 0; i < k; ++i) inv(i) = mu(i) > cutoff ? 1.0 / mu(i) : 0.0;
  auto solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    return v * (inv.asDiagonal() * (v.transpose() * (sub.transpose() * rhs)));
  };
  Eigen::VectorXd z = solve(b);
  for (int round = 0; round < 2; ++round) z += solve(b - sub * z);
  return z;
}

}  // namespace detail

/**
 * @brief Lawson-Hanson active-set solver for min |A x - b|_2 subject to x >= 0.
 *
 * Columns are scaled to unit norm internally. Throws SolverNotConverged when
 * the number of outer iterations exceeds `max_iterations`.
 */
inline NnlsResult nnls(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b, int max_iterations) {
  const Eigen::Index m = a_in.rows(), n = a_in.cols();
  if (b.size() != m) throw DimensionMismatch("nnls: right-hand side length differs from row count");
  if (!a_in.allFinite() || !b.allFinite()) throw InvalidArgument("nnls: non-finite input");

  Eigen::VectorXd scale(n);
  Eigen::MatrixXd a = a_in;
  for (Eigen::Index j = 0; j < n; ++j) {
    double c = a.col(j).norm();
    scale(j) = c > 0.0 ? c : 1.0;
    a.col(j) /= scale(j);
  }

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() * static_cast<double>(std::max(m, n)) *
                     std::max(1.0, b.norm());
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  int iterations = 0;

  auto passive_cols = [&] {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    return cols;
  };

  while (true) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) break;
    if (++iterations > max_iterations) {
      std::ostringstream os;
      os << "nnls: no convergence within " << max_iterations << " iterations";
      throw SolverNotConverged(os.str());
    }
    passive[static_cast<std::size_t>(best)] = true;

    bool rejected = false;
    for (int inner = 0; inner <= 3 * n; ++inner) {
      auto cols = passive_cols();
      Eigen::VectorXd z_sub = detail::passive_least_squares(a, b, cols);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < cols.size(); ++i) z(cols[i]) = z_sub(static_cast<Eigen::Index>(i));
      // A column whose gradient is positive only through round-off.
      if (inner == 0 && z(best) <= 0.0) {
        passive[static_cast<std::size_t>(best)] = false;
        w(best) = 0.0;
        rejected = true;
        break;
      }

      bool feasible = true;
      for (auto j : cols) feasible = feasible && z(j) > 0.0;
      if (feasible) {
        x = z;
        break;
      }
      // Step towards z until the first passive variable hits zero.
      double alpha = 1.0;
      for (auto j : cols)
        if (z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (auto j : cols)
        if (x(j) <= 1e-300 || (z(j) <= 0.0 && x(j) <= std::abs(x(j) - z(j)) * 1e-14)) {
          x(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = false;
        }
      if (passive_cols().empty()) break;
    }
    if (!rejected) w = a.transpose() * (b - a * x);
  }

  NnlsResult out;
  out.x = x.cwiseQuotient(scale);
  out.residual_norm = (a_in * out.x - b).norm();
  out.iterations = iterations;
  return out;
}

}  // namespace loewner
