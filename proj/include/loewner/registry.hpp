#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/scalar_function.hpp"

namespace loewner {

namespace detail {

inline double parse_double(std::string_view s, std::string_view what) {
  std::string buf(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != buf.size() || !std::isfinite(v))
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + buf + "'");
  return v;
}

inline std::vector<double> parse_params(std::string_view s, std::size_t count,
                                        std::string_view what) {
  std::vector<double> out;
  while (true) {
    auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.size() != count)
    throw InvalidArgument(std::string(what) + " expects " + std::to_string(count) + " parameter(s)");
  return out;
}

}  // namespace detail

namespace functions {

inline ScalarFunction identity() {
  return {"identity", Interval::real_line(), [](double t) { return t; },
          [](double) { return 1.0; }, [](double) { return 0.0; }};
}

inline ScalarFunction affine(double slope, double intercept) {
  return {"affine", Interval::real_line(), [=](double t) { return slope * t + intercept; },
          [=](double) { return slope; }, [](double) { return 0.0; }};
}

/**
 * t^p. The domain is the real line for nonnegative integer p, (0, inf) for
 * negative p, and [0, inf) otherwise.
 */
inline ScalarFunction power(double p) {
  bool integral = std::floor(p) == p;
  Interval dom = p < 0.0 ? Interval::positive()
                 : integral ? Interval::real_line()
                            : Interval::nonnegative();
  if (p == 0.0)
    return {"power", dom, [](double) { return 1.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; }};
  return {"power", dom, [=](double t) { return std::pow(t, p); },
          [=](double t) { return p == 1.0 ? 1.0 : p * std::pow(t, p - 1.0); },
          [=](double t) {
            return (p == 1.0 || p == 2.0) ? p * (p - 1.0) : p * (p - 1.0) * std::pow(t, p - 2.0);
          }};
}

inline ScalarFunction sqrt() {
  return {"sqrt", Interval::nonnegative(), [](double t) { return std::sqrt(t); },
          [](double t) { return 0.5 / std::sqrt(t); },
          [](double t) { return -0.25 / (t * std::sqrt(t)); }};
}

inline ScalarFunction log() {
  return {"log", Interval::positive(), [](double t) { return std::log(t); },
          [](double t) { return 1.0 / t; }, [](double t) { return -1.0 / (t * t); }};
}

/// t log t with the continuous extension 0 at t = 0.
inline ScalarFunction xlogx() {
  return {"xlogx", Interval::nonnegative(), [](double t) { return t == 0.0 ? 0.0 : t * std::log(t); },
          [](double t) { return std::log(t) + 1.0; }, [](double t) { return 1.0 / t; }};
}

/// (t-1)/log t with f(0) = 0 and f(1) = 1.
inline double logmean_value(double t) {
  if (t == 0.0) return 0.0;
  double u = t - 1.0;
  if (u == 0.0) return 1.0;
  return u / std::log1p(u);
}

inline ScalarFunction logmean() {
  return {"logmean", Interval::nonnegative(), [](double t) { return logmean_value(t); }};
}

inline ScalarFunction neg_inv() {
  return {"neg_inv", Interval::positive(), [](double t) { return -1.0 / t; },
          [](double t) { return 1.0 / (t * t); }, [](double t) { return -2.0 / (t * t * t); }};
}

inline ScalarFunction exp() {
  return {"exp", Interval::real_line(), [](double t) { return std::exp(t); },
          [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); }};
}

}  // namespace functions

/**
 * Looks up a built-in function by registry name: "identity", "affine:m,c",
 * "power:p", "sqrt", "log", "xlogx", "logmean", "neg_inv", "exp".
 * Returns nullopt for names outside the registry.
 */
inline std::optional<ScalarFunction> registry_function(std::string_view name) {
  if (name == "identity") return functions::identity();
  if (name == "sqrt") return functions::sqrt();
  if (name == "log") return functions::log();
  if (name == "xlogx") return functions::xlogx();
  if (name == "logmean") return functions::logmean();
  if (name == "neg_inv") return functions::neg_inv();
  if (name == "exp") return functions::exp();
  if (name.starts_with("affine:")) {
    auto p = detail::parse_params(name.substr(7), 2, "affine");
    return functions::affine(p[0], p[1]);
  }
  if (name.starts_with("power:")) {
    double p = detail::parse_params(name.substr(6), 1, "power")[0];
    return functions::power(p);
  }
  return std::nullopt;
}

}  // namespace loewner
