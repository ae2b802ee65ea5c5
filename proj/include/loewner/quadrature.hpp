#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule: Newton iteration on P_n from the Chebyshev-like
/// initial guess, weights 2 / ((1 - x^2) P_n'(x)^2).
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  GaussRule rule{std::vector<double>(static_cast<std::size_t>(n)),
                 std::vector<double>(static_cast<std::size_t>(n))};
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    auto lo = static_cast<std::size_t>(i);
    auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -z;
    rule.nodes[hi] = z;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

inline const GaussRule& gauss_legendre_64() {
  static const GaussRule rule = gauss_legendre(64);
  return rule;
}

/// Single application of the rule on [a, b]; terms are summed in node order.
template <class F>
double gauss_panel(F&& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * s;
}

/**
 * @brief Composite 64-point Gauss-Legendre on [a, b] with dyadic refinement.
 *
 * Level k uses 2^k equal panels; stops once two consecutive levels agree to
 * rel_tol (relative to the larger magnitude, or absolutely when both
 * vanish). Throws QuadratureFailure after max_level.
 */
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-8, int max_level = 14) {
  const GaussRule& rule = gauss_legendre_64();
  double prev = gauss_panel(f, a, b, rule);
  for (int level = 1; level <= max_level; ++level) {
    const int panels = 1 << level;
    const double h = (b - a) / panels;
    double cur = 0.0;
    for (int k = 0; k < panels; ++k) cur += gauss_panel(f, a + k * h, a + (k + 1) * h, rule);
    double scale = std::max(std::abs(cur), std::abs(prev));
    if (std::abs(cur - prev) <= rel_tol * scale) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "quadrature on [" << a << ", " << b << "] did not reach relative tolerance " << rel_tol;
  throw QuadratureFailure(os.str());
}

}  // namespace loewner
