#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include "loewner/divided_differences.hpp"
#include "loewner/errors.hpp"
#include "loewner/nnls.hpp"
#include "loewner/quadrature.hpp"
#include "loewner/registry.hpp"
#include "loewner/scalar_function.hpp"
#include "loewner/verdict.hpp"

namespace loewner {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kQuadratureTol = 1e-8;

/// t(1+l)/(t+l) for l in (0, inf); 1 at l = 0; t at l = inf.
inline double phi(double t, double lambda) {
  if (!(t >= 0.0)) throw DomainViolation("phi: t must be nonnegative");
  if (lambda == 0.0) return 1.0;
  if (lambda == kInfinity) return t;
  if (!(lambda > 0.0)) throw DomainViolation("phi: lambda must lie in [0, inf]");
  if (t == 0.0) return 0.0;
  return t * (1.0 + lambda) / (t + lambda);
}

struct Atom {
  double lambda;
  double weight;
};

/// (sin(p pi)/pi) l^(p-1)/(1+l) dl, the representing density of t^p.
struct PowerDensity {
  double p;
};

/// Explicit quadrature plan: sum_k weights[k] * phi_t(lambdas[k]).
struct NodeDensity {
  std::vector<double> lambdas;
  std::vector<double> weights;
};

using Density = std::variant<PowerDensity, NodeDensity>;

/**
 * @brief Finite Borel measure on [0, inf] representing an operator monotone
 * function f(t) = a + b t + int phi_t(l) dm(l).
 */
struct RepresentingMeasure {
  double atom_zero = 0.0;
  double atom_inf = 0.0;
  std::vector<Atom> atoms;
  std::optional<Density> density;

  void validate() const {
    auto nonneg = [](double v, const char* what) {
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgument(std::string("measure: ") + what + " must be finite and nonnegative");
    };
    nonneg(atom_zero, "atom_zero");
    nonneg(atom_inf, "atom_inf");
    for (const auto& a : atoms) {
      if (!std::isfinite(a.lambda) || !(a.lambda > 0.0))
        throw InvalidArgument("measure: atom locations must be finite and positive");
      nonneg(a.weight, "atom weight");
    }
    if (!density) return;
    if (const auto* pd = std::get_if<PowerDensity>(&*density)) {
      if (!(pd->p > 0.0 && pd->p < 1.0)) throw InvalidArgument("measure: power density needs 0 < p < 1");
    } else {
      const auto& nd = std::get<NodeDensity>(*density);
      if (nd.lambdas.size() != nd.weights.size())
        throw InvalidArgument("measure: custom_nodes lambdas and weights differ in length");
      for (std::size_t k = 0; k < nd.lambdas.size(); ++k) {
        if (!std::isfinite(nd.lambdas[k]) || !(nd.lambdas[k] > 0.0))
          throw InvalidArgument("measure: custom node locations must be finite and positive");
        nonneg(nd.weights[k], "custom node weight");
      }
    }
  }
};

namespace detail {

// The power density integrated against g(l) on (0, inf), split at l = 1.
// On (0, 1] l = s^(1/p) turns l^(p-1) dl into ds / p; on [1, inf)
// l = s^(-1/(1-p)) turns l^(p-1) dl into ds / (1-p). Both integrands are
// bounded, so plain composite Gauss-Legendre applies.
template <class G>
double power_density_integral(double p, G&& g) {
  const double lower = integrate(
      [&](double s) {
        double lam = std::pow(s, 1.0 / p);
        return g(lam) / (1.0 + lam);
      },
      0.0, 1.0, kQuadratureTol);
  const double q = 1.0 / (1.0 - p);
  const double upper = integrate(
      [&](double s) {
        double lam = std::pow(s, -q);
        // l / (1 + l) -> 1 as s -> 0; g carries the kernel.
        return std::isfinite(lam) ? g(lam) / (1.0 + lam) * lam : g(kInfinity);
      },
      0.0, 1.0, kQuadratureTol);
  return std::sin(p * std::numbers::pi) / std::numbers::pi * (lower / p + q * upper);
}

}  // namespace detail

/// Mass of the absolutely continuous part.
inline double density_mass(const Density& d) {
  if (const auto* pd = std::get_if<PowerDensity>(&d))
    return detail::power_density_integral(pd->p, [](double) { return 1.0; });
  const auto& nd = std::get<NodeDensity>(d);
  double s = 0.0;
  for (double w : nd.weights) s += w;
  return s;
}

inline double total_mass(const RepresentingMeasure& m) {
  double s = m.atom_zero + m.atom_inf;
  for (const auto& a : m.atoms) s += a.weight;
  if (m.density) s += density_mass(*m.density);
  return s;
}

/// f(t) = a + b t + sum w_j phi_t(l_j) + int phi_t dm_density.
inline double eval_measure(const RepresentingMeasure& m, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainViolation("eval_measure: t must be finite and >= 0");
  double s = m.atom_zero + m.atom_inf * t;
  for (const auto& a : m.atoms) s += a.weight * phi(t, a.lambda);
  if (m.density) {
    if (const auto* pd = std::get_if<PowerDensity>(&*m.density)) {
      if (t > 0.0)
        s += detail::power_density_integral(pd->p, [t](double lam) {
          // phi_t(l) with the (1 + l) factor cancelled against the density.
          return lam == kInfinity ? t : t * (1.0 + lam) / (t + lam);
        });
    } else {
      const auto& nd = std::get<NodeDensity>(*m.density);
      for (std::size_t k = 0; k < nd.lambdas.size(); ++k) s += nd.weights[k] * phi(t, nd.lambdas[k]);
    }
  }
  return s;
}

/// Representing measure of t^p, 0 < p < 1.
inline RepresentingMeasure measure_power(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("measure_power needs 0 < p < 1");
  RepresentingMeasure m;
  m.density = PowerDensity{p};
  return m;
}

/// psi(x) = (1+x)/(1-x), mapping (-1, 1) onto (0, inf).
inline double mobius(double x) {
  if (!(std::abs(x) < 1.0)) throw DomainViolation("mobius: argument must lie in (-1, 1)");
  return (1.0 + x) / (1.0 - x);
}

inline double mobius_inv(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainViolation("mobius_inv: argument must lie in (0, inf)");
  return (t - 1.0) / (t + 1.0);
}

/**
 * @brief f(x) = f0 + f'(0) int x/(1 - l x) dmu(l) on (-1, 1) with mu a
 * probability measure on [-1, 1] given by atoms.
 */
struct SymmetricMeasure {
  double f0 = 0.0;
  double fprime0 = 1.0;
  std::vector<Atom> mu;

  void validate() const {
    if (!std::isfinite(f0)) throw InvalidArgument("symmetric measure: f0 must be finite");
    if (!(fprime0 > 0.0) || !std::isfinite(fprime0))
      throw InvalidArgument("symmetric measure: fprime0 must be positive");
    double mass = 0.0;
    for (const auto& a : mu) {
      if (!(a.lambda >= -1.0 && a.lambda <= 1.0))
        throw InvalidArgument("symmetric measure: support must lie in [-1, 1]");
      if (!(a.weight >= 0.0)) throw InvalidArgument("symmetric measure: weights must be nonnegative");
      mass += a.weight;
    }
    if (std::abs(mass - 1.0) > 1e-10) throw InvalidArgument("symmetric measure: total mass must be 1");
  }
};

inline double eval_symmetric(const SymmetricMeasure& s, double x) {
  if (!(std::abs(x) < 1.0)) throw DomainViolation("eval_symmetric: x must lie in (-1, 1)");
  double acc = 0.0;
  for (const auto& a : s.mu) acc += a.weight * x / (1.0 - a.lambda * x);
  return s.f0 + s.fprime0 * acc;
}

/**
 * Pushes a symmetric-interval representation of g to the half-line
 * representation of f(t) = g(psi^-1(t)): an atom of mu at l becomes mass
 * f'(0) w/(1+l) at psi(l) (at infinity for l = 1), and f(0) = g(-1) goes to
 * the atom at zero. Requires mu({-1}) = 0 and g(-1) >= 0.
 */
inline RepresentingMeasure to_half_line(const SymmetricMeasure& s) {
  s.validate();
  RepresentingMeasure m;
  double g_minus_one = s.f0;
  for (const auto& a : s.mu) {
    if (a.weight == 0.0) continue;
    if (a.lambda == -1.0) throw InvalidArgument("to_half_line: mu has an atom at -1");
    double w = s.fprime0 * a.weight / (1.0 + a.lambda);
    g_minus_one -= w;
    if (a.lambda == 1.0) m.atom_inf += w;
    else m.atoms.push_back({mobius(a.lambda), w});
  }
  if (g_minus_one < -1e-12 * std::max(1.0, std::abs(s.f0)))
    throw InvalidArgument("to_half_line: the function is negative at t = 0");
  m.atom_zero = std::max(0.0, g_minus_one);
  return m;
}

namespace detail {

// Limit of value(k) over k = 10..40, accepting either the raw sequence or its
// Aitken delta-squared acceleration once successive terms agree to
// 1e-8 * max(1, |limit|).
template <class Value>
double stabilized_limit(Value&& value, const char* what) {
  constexpr double tol = 1e-8;
  std::vector<double> raw, acc;
  for (int k = 10; k <= 40; ++k) {
    double r = value(k);
    if (!std::isfinite(r)) break;
    raw.push_back(r);
    const std::size_t n = raw.size();
    if (n >= 2 && std::abs(raw[n - 1] - raw[n - 2]) < tol * std::max(1.0, std::abs(raw[n - 1])))
      return raw[n - 1];
    if (n >= 3) {
      double d1 = raw[n - 1] - raw[n - 2];
      double d0 = raw[n - 2] - raw[n - 3];
      double denom = d1 - d0;
      acc.push_back(denom == 0.0 ? raw[n - 1] : raw[n - 1] - d1 * d1 / denom);
      const std::size_t m = acc.size();
      if (m >= 2 && std::abs(acc[m - 1] - acc[m - 2]) < tol * std::max(1.0, std::abs(acc[m - 1])))
        return acc[m - 1];
    }
  }
  throw LimitNotConverged(std::string("limit of ") + what + " did not stabilize");
}

}  // namespace detail

struct BoundaryAtoms {
  double a;  ///< f(0), or f(0+) when 0 is outside the domain
  double b;  ///< lim f(t)/t as t -> inf
};

inline BoundaryAtoms extract_atoms(const ScalarFunction& f) {
  if (!f.domain().includes(Interval::positive()))
    throw DomainViolation("extract_atoms: " + f.name() + " must be defined on (0, inf)");
  BoundaryAtoms out{};
  if (f.domain().contains(0.0)) {
    out.a = f(0.0);
  } else {
    out.a = detail::stabilized_limit([&](int k) { return f(std::ldexp(1.0, -k)); }, "f(t) as t -> 0+");
  }
  out.b = detail::stabilized_limit(
      [&](int k) {
        double t = std::ldexp(1.0, k);
        return f(t) / t;
      },
      "f(t)/t as t -> inf");
  return out;
}

struct Sample {
  double t;
  double f;
};

struct FitResult {
  RepresentingMeasure measure;
  std::vector<double> nodes;
  double residual_norm = 0.0;
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  int iterations = 0;
};

/// node_count points log-spaced on [t_min/10, t_max*10], t_min the smallest
/// positive sample location.
inline std::vector<double> fit_nodes(std::span<const Sample> samples, int node_count) {
  double tmin = kInfinity, tmax = 0.0;
  for (const auto& s : samples)
    if (s.t > 0.0) {
      tmin = std::min(tmin, s.t);
      tmax = std::max(tmax, s.t);
    }
  if (!(tmax > 0.0)) throw InvalidArgument("fit: need at least one positive sample location");
  const double lo = std::log(tmin / 10.0), hi = std::log(tmax * 10.0);
  std::vector<double> nodes(static_cast<std::size_t>(node_count));
  for (int j = 0; j < node_count; ++j)
    nodes[static_cast<std::size_t>(j)] =
        node_count == 1 ? std::exp(0.5 * (lo + hi)) : std::exp(lo + (hi - lo) * j / (node_count - 1));
  return nodes;
}

/**
 * @brief Nonnegative least-squares fit of a discrete representing measure.
 *
 * Unknowns a, b and one weight per node, all constrained to be nonnegative.
 * Relative residuals use max(|f_i|, 1e-12 max_j |f_j|) as denominator.
 */
inline FitResult fit_discrete_measure(std::span<const Sample> samples, int node_count) {
  if (node_count < 1) throw InvalidArgument("fit: node_count must be positive");
  if (samples.size() < static_cast<std::size_t>(node_count) + 2)
    throw InvalidArgument("fit: need at least node_count + 2 samples");
  std::vector<double> ts;
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || s.t < 0.0 || !std::isfinite(s.f))
      throw InvalidArgument("fit: samples must be finite with t >= 0");
    ts.push_back(s.t);
  }
  std::sort(ts.begin(), ts.end());
  if (std::adjacent_find(ts.begin(), ts.end()) != ts.end())
    throw InvalidArgument("fit: sample locations must be distinct");

  FitResult out;
  out.nodes = fit_nodes(samples, node_count);
  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(rows, node_count + 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = s.t;
    for (int j = 0; j < node_count; ++j) design(i, j + 2) = phi(s.t, out.nodes[static_cast<std::size_t>(j)]);
    rhs(i) = s.f;
  }
  NnlsResult sol = nnls(design, rhs, 10 * node_count);

  out.measure.atom_zero = sol.x(0);
  out.measure.atom_inf = sol.x(1);
  for (int j = 0; j < node_count; ++j)
    if (sol.x(j + 2) > 0.0) out.measure.atoms.push_back({out.nodes[static_cast<std::size_t>(j)], sol.x(j + 2)});
  out.iterations = sol.iterations;

  Eigen::VectorXd r = design * sol.x - rhs;
  out.residual_norm = r.norm();
  out.max_abs_residual = r.cwiseAbs().maxCoeff();
  const double floor = 1e-12 * rhs.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < rows; ++i)
    out.max_rel_residual = std::max(out.max_rel_residual, std::abs(r(i)) / std::max(std::abs(rhs(i)), floor));
  return out;
}

/// (t-1)/log t by Gauss-Legendre quadrature of int_0^1 t^x dx (64 nodes).
inline double logmean_quadrature(double t) {
  if (!(t >= 0.0)) throw DomainViolation("logmean: t must be nonnegative");
  if (t == 0.0) return 0.0;
  return gauss_panel([t](double x) { return std::pow(t, x); }, 0.0, 1.0, gauss_legendre_64());
}

/// (t-1)/log t with f(0) = 0 and f(1) = 1.
inline double logmean_eval(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainViolation("logmean: t must be finite and >= 0");
  return functions::logmean_value(t);
}

/// x/(1 - l x) on (-1, 1), an extreme point of the normalized class.
inline ScalarFunction extreme_point(double lambda) {
  if (!(lambda >= -1.0 && lambda <= 1.0)) throw InvalidArgument("extreme_point: lambda must lie in [-1, 1]");
  return {"x/(1-lx)", Interval::open(-1.0, 1.0), [=](double x) { return x / (1.0 - lambda * x); },
          [=](double x) { return 1.0 / ((1.0 - lambda * x) * (1.0 - lambda * x)); },
          [=](double x) {
            double d = 1.0 - lambda * x;
            return 2.0 * lambda / (d * d * d);
          }};
}

/// Grid used by check_K_bounds: 1000 points spread uniformly over (-1, 1).
inline std::vector<double> k_bounds_grid() {
  std::vector<double> g(1000);
  for (int k = 0; k < 1000; ++k) g[static_cast<std::size_t>(k)] = -1.0 + (2.0 * k + 1.0) / 1000.0;
  return g;
}

/**
 * @brief Bounds for operator monotone f on (-1, 1) after normalization to
 * f(0) = 0, f'(0) = 1:  f(x) <= x/(1-x) on [0, 1),  f(x) >= x/(1+x) on
 * (-1, 0],  |f''(0)| <= 2.
 *
 * Grid inequalities carry slack 1e-12 * max(1, |bound|); the second
 * derivative check allows 1e-6 for the central-difference error. The witness
 * records the offending point and the violation size.
 */
inline Verdict check_K_bounds(const ScalarFunction& f) {
  if (!f.domain().includes(Interval::open(-1.0, 1.0)))
    throw DomainViolation("check_K_bounds: " + f.name() + " must be defined on (-1, 1)");
  const double f0 = f(0.0);
  const double d0 = f.derivative(0.0);
  if (!(d0 > 0.0)) throw InvalidArgument("check_K_bounds: f'(0) must be positive");
  auto g = [&](double x) { return (f(x) - f0) / d0; };

  Verdict v;
  auto fail = [&](double x, double violation, const char* label) {
    v.passed = false;
    Witness w;
    w.check = label;
    w.points = {x};
    w.lambda_min = -violation;
    v.witness = w;
  };
  for (double x : k_bounds_grid()) {
    ++v.checks_run;
    const double bound = x >= 0.0 ? x / (1.0 - x) : x / (1.0 + x);
    const double slack = 1e-12 * std::max(1.0, std::abs(bound));
    const double gx = g(x);
    if (x >= 0.0 && gx > bound + slack) {
      fail(x, gx - bound, "upper bound");
      return v;
    }
    if (x <= 0.0 && gx < bound - slack) {
      fail(x, bound - gx, "lower bound");
      return v;
    }
  }
  ++v.checks_run;
  const double h = 1e-4;
  const double second = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
  if (std::abs(second) > 2.0 + 1e-6) fail(0.0, std::abs(second) - 2.0, "second derivative");
  return v;
}

}  // namespace loewner
