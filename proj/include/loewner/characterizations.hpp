#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loewner/divided_differences.hpp"
#include "loewner/linalg.hpp"
#include "loewner/parallel.hpp"
#include "loewner/random.hpp"
#include "loewner/registry.hpp"
#include "loewner/scalar_function.hpp"
#include "loewner/verdict.hpp"

namespace loewner {

/// Probability with which a sampled eigenvalue is set exactly to a closed
/// lower endpoint.
inline constexpr double kEndpointHitProbability = 0.1;
inline constexpr int kMaxRejections = 1000;

struct TrialConfig {
  /// Matrix dimension; 0 cycles through 2, 3, 4, 5, 6 by trial index.
  int dim = 0;
  int trials = 500;
  std::uint64_t seed = 0;
  double tol_rel = 1e-8;
  Interval interval = Interval::closed_open(0.0, 10.0);
  /// check_lh only: use the fixed 2x2 counterexample pair as trial 0.
  bool include_reference_pair = false;

  int dim_for(int trial) const { return dim > 0 ? dim : 2 + trial % 5; }

  void validate() const {
    if (dim < 0) throw InvalidArgument("dim must be positive (or 0 to cycle)");
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    if (!(tol_rel > 0.0)) throw InvalidArgument("tol_rel must be positive");
  }
};

/// A >= B.
struct OrderedPair {
  HermitianMatrix a;
  HermitianMatrix b;
};

inline CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  return g;
}

/// Gram-Schmidt (applied twice per column) on a complex Gaussian matrix.
inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  while (true) {
    CMatrix q = random_gaussian(n, n, rng);
    bool ok = true;
    for (Eigen::Index j = 0; j < n && ok; ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
      double norm = q.col(j).norm();
      ok = norm > 1e-8;
      if (ok) q.col(j) /= norm;
    }
    if (ok) return q;
  }
}

namespace detail {

inline double upper_sample_bound(const Interval& j) {
  return j.hi() - kGridMargin * std::max(1.0, std::abs(j.hi()));
}

inline double lower_sample_bound(const Interval& j) {
  return j.lo() + kGridMargin * std::max(1.0, std::abs(j.lo()));
}

inline void require_bounded(const Interval& j) {
  if (!j.bounded()) throw InvalidArgument("random sampling needs a bounded interval " + j.to_string());
}

inline bool spectrum_inside(const HermitianMatrix& m, const Interval& j) {
  RVector v = eigh(m).values;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    try {
      j.clamp_with_margin(v(k));
    } catch (const DomainViolation&) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/**
 * U diag(l) U* with each l_k uniform in the inset interior of J. When the
 * lower endpoint is closed, each l_k is set to it exactly with probability
 * 0.1.
 */
inline HermitianMatrix random_hermitian(const Interval& j, Eigen::Index n, Rng& rng) {
  detail::require_bounded(j);
  if (n < 1) throw InvalidArgument("dimension must be positive");
  const double lo = detail::lower_sample_bound(j);
  const double hi = detail::upper_sample_bound(j);
  RVector lambda(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    bool hit = j.lo_closed() && rng.uniform() < kEndpointHitProbability;
    lambda(k) = hit ? j.lo() : rng.uniform(lo, hi);
  }
  CMatrix u = random_unitary(n, rng);
  return HermitianMatrix(CMatrix(u * lambda.asDiagonal() * u.adjoint()));
}

/**
 * B from random_hermitian on a random lower part of J, then A = B + s Q with
 * Q a unit-norm PSD matrix of random rank and s <= max_bump * (headroom of B
 * below the top of J). Pairs whose A leaves J are redrawn.
 */
inline OrderedPair random_ordered_pair(const Interval& j, Eigen::Index n, Rng& rng,
                                       double max_bump = 1.0) {
  detail::require_bounded(j);
  const double top = detail::upper_sample_bound(j);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    double frac = rng.uniform(0.3, 1.0);
    double sub_hi = j.lo() + frac * (j.hi() - j.lo());
    Interval sub(j.lo(), sub_hi, j.lo_closed(), false);
    HermitianMatrix b = random_hermitian(sub, n, rng);

    int rank = rng.uniform_int(1, static_cast<int>(n));
    CMatrix g = random_gaussian(n, rank, rng);
    CMatrix q = g * g.adjoint();
    q /= operator_norm(q);
    double headroom = top - eigh(b).values(n - 1);
    if (!(headroom > 0.0)) continue;
    double s = max_bump * headroom * rng.uniform();
    if (rng.uniform() < 0.5) s *= 0.01;

    HermitianMatrix a(CMatrix(b.matrix() + s * q));
    if (detail::spectrum_inside(a, j) && detail::spectrum_inside(b, j)) return {a, b};
  }
  throw GenerationFailure("random_ordered_pair: too many rejections on " + j.to_string());
}

/// Gaussian matrix divided by max(1 + 1e-12, its operator norm).
inline CMatrix random_contraction(Eigen::Index n, Rng& rng) {
  CMatrix g = random_gaussian(n, n, rng);
  return g / std::max(1.0 + 1e-12, operator_norm(g));
}

inline HermitianMatrix random_projection(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  CMatrix u = random_unitary(n, rng).leftCols(rank);
  return HermitianMatrix(CMatrix(u * u.adjoint()));
}

/// The fixed 2x2 pair A = diag(3/2, 3/4) >= B = [[1/2,1/2],[1/2,1/2]] >= 0.
inline OrderedPair reference_pair() {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1.5, 0.0, 0.0, 0.75;
  b << 0.5, 0.5, 0.5, 0.5;
  return {HermitianMatrix(a), HermitianMatrix(b)};
}

namespace detail {

// Reports `diff` (which should be PSD) as a witness when it fails at tol_rel
// and again at the certification tolerance after recomputation.
template <class Recompute>
std::optional<Witness> certify(const HermitianMatrix& diff, double tol_rel, Recompute&& recompute,
                               std::uint64_t seed, int trial, std::string check,
                               std::vector<CMatrix> inputs) {
  if (is_psd(diff, tol_rel)) return std::nullopt;
  HermitianMatrix again = recompute();
  if (is_psd(again, kCertifyTol)) return std::nullopt;
  Witness w;
  w.seed = seed;
  w.trial = trial;
  w.check = std::move(check);
  w.matrices = std::move(inputs);
  w.matrices.push_back(again.matrix());
  w.lambda_min = lambda_min(again);
  return w;
}

inline void require_domain(const ScalarFunction& f, const Interval& j) {
  if (!f.domain().includes(j))
    throw DomainViolation("interval " + j.to_string() + " is not inside the domain " +
                          f.domain().to_string() + " of " + f.name());
}

inline Verdict relabel(Verdict v, const std::string& label) {
  if (v.witness) v.witness->check = label;
  return v;
}

}  // namespace detail

/**
 * @brief Randomized check that f(B) <= f(A) for every generated pair B <= A.
 *
 * Witness matrices: A, B, f(A) - f(B).
 */
inline Verdict check_monotone_pairs(const ScalarFunction& f, const TrialConfig& cfg) {
  cfg.validate();
  detail::require_domain(f, cfg.interval);
  return run_trials(cfg.trials, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(trial));
    OrderedPair p = random_ordered_pair(cfg.interval, cfg.dim_for(trial), rng);
    auto diff = [&] { return functional_calculus(f, p.a) - functional_calculus(f, p.b); };
    return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, "monotone",
                           {p.a.matrix(), p.b.matrix()});
  });
}

/**
 * @brief Loewner-Heinz check: A >= B >= 0 implies A^p >= B^p.
 *
 * Holds for p in [0,1]; for p > 1 a failing pair is expected. Witness
 * matrices: A, B, A^p - B^p.
 */
inline Verdict check_lh(double p, const TrialConfig& cfg) {
  cfg.validate();
  if (cfg.interval.lo() < 0.0) throw InvalidArgument("check_lh needs an interval inside [0, inf)");
  if (!(p >= 0.0)) throw InvalidArgument("check_lh needs p >= 0");
  const ScalarFunction f = functions::power(p);
  const OrderedPair ref = reference_pair();
  const bool use_ref = cfg.include_reference_pair && detail::spectrum_inside(ref.a, cfg.interval) &&
                       detail::spectrum_inside(ref.b, cfg.interval);
  return run_trials(cfg.trials, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(trial));
    OrderedPair pair = (use_ref && trial == 0)
                           ? ref
                           : random_ordered_pair(cfg.interval, cfg.dim_for(trial), rng);
    auto diff = [&] { return functional_calculus(f, pair.a) - functional_calculus(f, pair.b); };
    return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, "lh",
                           {pair.a.matrix(), pair.b.matrix()});
  });
}

struct PowerCounterexample {
  HermitianMatrix a;
  HermitianMatrix b;
  double det_closed_form;
  double det_numeric;
  bool order_holds;  ///< A^p >= B^p numerically
};

/// (3/8)^p (3^p - (2^p + 4^p)/2) = det(A^p - B^p) for the reference pair.
inline double counterexample_det(double p) {
  return std::pow(3.0 / 8.0, p) * (std::pow(3.0, p) - 0.5 * (std::pow(2.0, p) + std::pow(4.0, p)));
}

inline PowerCounterexample counterexample_tp(double p, double tol_rel = kPsdTol) {
  if (!(p > 0.0)) throw InvalidArgument("counterexample_tp needs p > 0");
  OrderedPair ref = reference_pair();
  ScalarFunction f = functions::power(p);
  HermitianMatrix d = functional_calculus(f, ref.a) - functional_calculus(f, ref.b);
  double det = (d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0)).real();
  return {ref.a, ref.b, counterexample_det(p), det, is_psd(d, tol_rel)};
}

enum class HpVariant { Contraction, SumOfCompressions, Projection };

inline std::string to_string(HpVariant v) {
  switch (v) {
    case HpVariant::Contraction: return "hp-iv";
    case HpVariant::SumOfCompressions: return "hp-v";
    case HpVariant::Projection: return "hp-vi";
  }
  return "hp";
}

/**
 * @brief Hansen-Pedersen compression inequalities on [0, alpha).
 *
 *  - Contraction:       f(X*AX) <= X* f(A) X, |X| <= 1
 *  - SumOfCompressions: f(X*AX + Y*BY) <= X*f(A)X + Y*f(B)Y, X*X + Y*Y <= I
 *  - Projection:        f(PAP) <= P f(A) P
 *
 * The compressed argument is passed through the functional calculus, so a
 * spectrum escaping [0, alpha) beyond the endpoint margin raises
 * DomainViolation. Witness matrices are the inputs followed by the
 * difference RHS - LHS.
 */
inline Verdict check_hp(HpVariant variant, const ScalarFunction& f, const TrialConfig& cfg) {
  cfg.validate();
  const Interval& j = cfg.interval;
  if (j.lo() != 0.0 || !j.lo_closed() || !j.bounded())
    throw InvalidArgument("check_hp needs an interval of the form [0, alpha) with finite alpha");
  detail::require_domain(f, j);
  const Interval compressed_domain(0.0, j.hi(), true, j.hi_closed());
  auto f_on = [&](const HermitianMatrix& m) {
    return apply_function([&](double x) { return f(x); }, compressed_domain, m);
  };
  const std::string label = to_string(variant);

  return run_trials(cfg.trials, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(trial));
    const Eigen::Index n = cfg.dim_for(trial);
    switch (variant) {
      case HpVariant::Contraction: {
        HermitianMatrix a = random_hermitian(j, n, rng);
        CMatrix x = random_contraction(n, rng);
        auto diff = [&] {
          return HermitianMatrix(CMatrix(x.adjoint() * functional_calculus(f, a).matrix() * x)) -
                 f_on(a.congruence(x));
        };
        return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, label,
                               {a.matrix(), x});
      }
      case HpVariant::SumOfCompressions: {
        HermitianMatrix a = random_hermitian(j, n, rng);
        HermitianMatrix b = random_hermitian(j, n, rng);
        CMatrix x = random_contraction(n, rng);
        CMatrix c = random_contraction(n, rng);
        HermitianMatrix gap(CMatrix(CMatrix::Identity(n, n) - x.adjoint() * x));
        CMatrix y = c * matrix_power(gap, 0.5).matrix();
        auto diff = [&] {
          CMatrix rhs = x.adjoint() * functional_calculus(f, a).matrix() * x +
                        y.adjoint() * functional_calculus(f, b).matrix() * y;
          HermitianMatrix arg(CMatrix(x.adjoint() * a.matrix() * x + y.adjoint() * b.matrix() * y));
          return HermitianMatrix(rhs) - f_on(arg);
        };
        return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, label,
                               {a.matrix(), b.matrix(), x, y});
      }
      case HpVariant::Projection: {
        HermitianMatrix a = random_hermitian(j, n, rng);
        int rank = n >= 2 ? rng.uniform_int(1, static_cast<int>(n) - 1) : rng.uniform_int(0, 1);
        HermitianMatrix p = random_projection(n, rank, rng);
        auto diff = [&] {
          return functional_calculus(f, a).congruence(p.matrix()) - f_on(a.congruence(p.matrix()));
        };
        return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, label,
                               {a.matrix(), p.matrix()});
      }
    }
    return std::nullopt;
  });
}

/// Midpoint convexity (sign = +1) or concavity (sign = -1) of f on cfg.
inline Verdict check_midpoint(const ScalarFunction& f, const TrialConfig& cfg, double sign,
                              const std::string& label) {
  cfg.validate();
  detail::require_domain(f, cfg.interval);
  return run_trials(cfg.trials, [&](int trial) -> std::optional<Witness> {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(trial));
    const Eigen::Index n = cfg.dim_for(trial);
    HermitianMatrix a = random_hermitian(cfg.interval, n, rng);
    HermitianMatrix b = random_hermitian(cfg.interval, n, rng);
    auto diff = [&] {
      HermitianMatrix mid = functional_calculus(f, 0.5 * (a + b));
      HermitianMatrix avg = 0.5 * (functional_calculus(f, a) + functional_calculus(f, b));
      return sign * (avg - mid);
    };
    return detail::certify(diff(), cfg.tol_rel, diff, cfg.seed, trial, label,
                           {a.matrix(), b.matrix()});
  });
}

/**
 * @brief Consequences of operator monotonicity for a positive f.
 *
 * Runs, in order and stopping at the first failure: monotonicity of f (the
 * premise), midpoint concavity of f, monotonicity of t/f(t), and midpoint
 * convexity of 1/f. Sub-check k uses seed cfg.seed + k. The interval is
 * restricted to exclude 0. `checks_run` totals all trials executed.
 */
inline Verdict check_corollaries(const ScalarFunction& f, const TrialConfig& cfg) {
  cfg.validate();
  detail::require_domain(f, cfg.interval);
  TrialConfig sub = cfg;
  if (cfg.interval.lo() <= 0.0) {
    if (cfg.interval.hi() <= 0.0) throw InvalidArgument("check_corollaries needs positive arguments");
    sub.interval = Interval(0.0, cfg.interval.hi(), false, cfg.interval.hi_closed());
  }
  const Interval dom = sub.interval;
  ScalarFunction ratio("t/f(t)", dom, [f](double t) { return t / f(t); });
  ScalarFunction recip("1/f(t)", dom, [f](double t) { return 1.0 / f(t); });

  int total = 0;
  auto stage = [&](std::uint64_t offset, auto&& run) -> std::optional<Verdict> {
    TrialConfig c = sub;
    c.seed = cfg.seed + offset;
    Verdict v = run(c);
    total += v.checks_run;
    if (v.passed) return std::nullopt;
    v.checks_run = total;
    return v;
  };

  if (auto v = stage(0, [&](const TrialConfig& c) {
        return detail::relabel(check_monotone_pairs(f, c), "premise:monotone");
      }))
    return *v;
  if (auto v = stage(1, [&](const TrialConfig& c) { return check_midpoint(f, c, -1.0, "concave"); }))
    return *v;
  if (auto v = stage(2, [&](const TrialConfig& c) {
        return detail::relabel(check_monotone_pairs(ratio, c), "t/f monotone");
      }))
    return *v;
  if (auto v = stage(3, [&](const TrialConfig& c) {
        return check_midpoint(recip, c, 1.0, "1/f convex");
      }))
    return *v;
  Verdict ok;
  ok.checks_run = total;
  return ok;
}

/**
 * Turns a failing 2-point Loewner grid {x, y} into B = diag(x, y) and
 * A = B + eps * [[1,1],[1,1]] with f(A) - f(B) certified non-PSD, shrinking
 * eps until the first-order term dominates. Returns nullopt if no eps works.
 */
inline std::optional<OrderedPair> pair_from_loewner_grid(const ScalarFunction& f, double x, double y,
                                                         const Interval& j) {
  if (!(x < y)) throw InvalidArgument("pair_from_loewner_grid needs x < y");
  HermitianMatrix b = HermitianMatrix::diagonal({x, y});
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  double room = std::isfinite(j.hi()) ? detail::upper_sample_bound(j) - y : y - x;
  double eps = 0.25 * std::min(y - x, room);
  for (int k = 0; k < 60 && eps > 0.0; ++k, eps *= 0.5) {
    HermitianMatrix a(CMatrix(b.matrix() + eps * ones.cast<Complex>()));
    if (!detail::spectrum_inside(a, j)) continue;
    HermitianMatrix d = functional_calculus(f, a) - functional_calculus(f, b);
    if (!is_psd(d, kCertifyTol)) return OrderedPair{a, b};
  }
  return std::nullopt;
}

/**
 * Searches the segment C_s = B + s (A - B) for a point whose spectrum gives a
 * non-PSD Loewner matrix. f(A) - f(B) integrates the Hadamard products of
 * these matrices with a PSD matrix, so some s must fail when the pair does.
 */
inline std::optional<std::vector<double>> loewner_grid_from_pair(const ScalarFunction& f,
                                                                 const OrderedPair& pair,
                                                                 int samples = 512) {
  const CMatrix h = pair.a.matrix() - pair.b.matrix();
  for (int k = 0; k < samples; ++k) {
    double s = (k + 0.5) / samples;
    HermitianMatrix c(CMatrix(pair.b.matrix() + s * h));
    RVector ev = eigh(c).values;
    std::vector<double> pts;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      double v = f.domain().clamp_with_margin(ev(i));
      if (pts.empty() || !detail::coalesced(v, pts.back(), kCoalesceTol)) pts.push_back(v);
    }
    if (pts.size() < 2) continue;
    if (!is_psd(loewner_matrix(f, pts), kCertifyTol)) return pts;
  }
  return std::nullopt;
}

}  // namespace loewner
