#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "loewner/linalg.hpp"
#include "loewner/parallel.hpp"
#include "loewner/random.hpp"
#include "loewner/scalar_function.hpp"
#include "loewner/verdict.hpp"

namespace loewner {

/// Relative separation below which two points are treated as one.
inline constexpr double kCoalesceTol = 1e-7;
/// Relative inset applied at finite endpoints when sampling grids.
inline constexpr double kGridMargin = 1e-6;
/// Tolerance used when re-certifying a failing matrix.
inline constexpr double kCertifyTol = 1e-12;

namespace detail {

inline bool coalesced(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

inline void require_in_domain(const ScalarFunction& f, double x) {
  f.domain().clamp_with_margin(x);
}

}  // namespace detail

/// First divided difference; f'((x+y)/2) when x and y coalesce.
inline double dd1(const ScalarFunction& f, double x, double y, double coalesce_tol = kCoalesceTol) {
  detail::require_in_domain(f, x);
  detail::require_in_domain(f, y);
  if (detail::coalesced(x, y, coalesce_tol)) return f.derivative(0.5 * (x + y));
  return (f(x) - f(y)) / (x - y);
}

/**
 * @brief Second divided difference f^[2](x, y, z).
 *
 * Arguments are sorted first, so the result is symmetric. When the outer
 * points coalesce all three do, and the value is f''/2 at their mean (the
 * limit of the recursive quotient).
 */
inline double dd2(const ScalarFunction& f, double x, double y, double z,
                  double coalesce_tol = kCoalesceTol) {
  std::array<double, 3> p{x, y, z};
  for (double v : p) detail::require_in_domain(f, v);
  std::sort(p.begin(), p.end());
  if (detail::coalesced(p[0], p[2], coalesce_tol))
    return 0.5 * f.second_derivative((p[0] + p[1] + p[2]) / 3.0);
  return (dd1(f, p[0], p[1], coalesce_tol) - dd1(f, p[1], p[2], coalesce_tol)) / (p[0] - p[2]);
}

/// [f^[1](l_i, l_j)]; points strictly increasing and pairwise separated.
inline HermitianMatrix loewner_matrix(const ScalarFunction& f, std::span<const double> points,
                                      double coalesce_tol = kCoalesceTol) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw InvalidArgument("loewner_matrix: empty point list");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]) || detail::coalesced(points[i], points[i - 1], coalesce_tol))
      throw DegeneratePoints("loewner_matrix: points must be strictly increasing and separated");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      m(i, j) = m(j, i) = dd1(f, points[static_cast<std::size_t>(i)],
                              points[static_cast<std::size_t>(j)], coalesce_tol);
  return HermitianMatrix(m);
}

/// [f^[2](base, l_i, l_j)].
inline HermitianMatrix kraus_matrix(const ScalarFunction& f, double base,
                                    std::span<const double> points,
                                    double coalesce_tol = kCoalesceTol) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw InvalidArgument("kraus_matrix: empty point list");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      m(i, j) = m(j, i) = dd2(f, base, points[static_cast<std::size_t>(i)],
                              points[static_cast<std::size_t>(j)], coalesce_tol);
  return HermitianMatrix(m);
}

/**
 * Draws n sorted, pairwise separated points uniformly from the interior of J,
 * inset by kGridMargin at each finite endpoint. Redraws on coalescence.
 */
inline std::vector<double> sample_grid(const Interval& j, int n, Rng& rng) {
  if (!j.bounded()) throw InvalidArgument("grid sampling needs a bounded interval " + j.to_string());
  const double lo = j.lo() + kGridMargin * std::max(1.0, std::abs(j.lo()));
  const double hi = j.hi() - kGridMargin * std::max(1.0, std::abs(j.hi()));
  if (!(lo < hi)) throw InvalidArgument("interval too narrow for grid sampling");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = rng.uniform(lo, hi);
    std::sort(pts.begin(), pts.end());
    bool ok = true;
    for (std::size_t i = 1; i < pts.size() && ok; ++i)
      ok = !detail::coalesced(pts[i], pts[i - 1], kCoalesceTol);
    if (ok) return pts;
  }
  throw GenerationFailure("could not draw a separated grid");
}

namespace detail {

inline void check_grid_preconditions(const ScalarFunction& f, const Interval& j, int n) {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  if (!f.domain().includes(j))
    throw DomainViolation("interval " + j.to_string() + " is not inside the domain " +
                          f.domain().to_string() + " of " + f.name());
}

}  // namespace detail

/**
 * @brief Randomized test of n-monotonicity through Loewner matrices.
 *
 * Grid i is drawn from Rng::stream(seed, i). A failure is reported only after
 * the Loewner matrix is rebuilt from the witness points and found non-PSD at
 * the certification tolerance.
 */
inline Verdict check_n_monotone(const ScalarFunction& f, const Interval& j, int n, int grids,
                                std::uint64_t seed, double tol_rel = kPsdTol) {
  detail::check_grid_preconditions(f, j, n);
  return run_trials(grids, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(trial));
    auto pts = sample_grid(j, n, rng);
    HermitianMatrix lm = loewner_matrix(f, pts);
    if (is_psd(lm, tol_rel)) return std::nullopt;
    HermitianMatrix again = loewner_matrix(f, pts);
    if (is_psd(again, kCertifyTol)) return std::nullopt;
    Witness w;
    w.seed = seed;
    w.trial = trial;
    w.check = "loewner";
    w.points = pts;
    w.matrices = {again.matrix()};
    w.lambda_min = lambda_min(again);
    return w;
  });
}

/// Randomized test of n-convexity through Kraus matrices; every grid point
/// serves in turn as the base point.
inline Verdict check_n_convex(const ScalarFunction& f, const Interval& j, int n, int grids,
                              std::uint64_t seed, double tol_rel = kPsdTol) {
  detail::check_grid_preconditions(f, j, n);
  return run_trials(grids, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(trial));
    auto pts = sample_grid(j, n, rng);
    for (double base : pts) {
      HermitianMatrix km = kraus_matrix(f, base, pts);
      if (is_psd(km, tol_rel)) continue;
      HermitianMatrix again = kraus_matrix(f, base, pts);
      if (is_psd(again, kCertifyTol)) continue;
      Witness w;
      w.seed = seed;
      w.trial = trial;
      w.check = "kraus";
      w.points = pts;
      w.base = base;
      w.matrices = {again.matrix()};
      w.lambda_min = lambda_min(again);
      return w;
    }
    return std::nullopt;
  });
}

}  // namespace loewner
