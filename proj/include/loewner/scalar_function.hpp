#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "loewner/interval.hpp"

namespace loewner {

/// Default relative step for finite-difference derivatives.
inline constexpr double kDefaultFdStep = 1e-6;

/**
 * @brief A real function on an interval, with optional analytic derivatives.
 *
 * When `d1`/`d2` are absent, derivatives fall back to central differences
 * with step fd_step * max(1, |x|) (first derivative) and
 * fd_step^(2/3) * max(1, |x|) (second derivative). The step is shortened so
 * the stencil never leaves the domain; at a closed endpoint a one-sided
 * stencil is used.
 */
class ScalarFunction {
 public:
  using Map = std::function<double(double)>;

  ScalarFunction(std::string name, Interval domain, Map eval,
                 std::optional<Map> d1 = std::nullopt,
                 std::optional<Map> d2 = std::nullopt,
                 double fd_step = kDefaultFdStep)
      : name_(std::move(name)), domain_(domain), eval_(std::move(eval)),
        d1_(std::move(d1)), d2_(std::move(d2)), fd_step_(fd_step) {
    if (!eval_) throw InvalidArgument("ScalarFunction needs an evaluator");
    if (!(fd_step_ > 0.0) || fd_step_ >= 1.0)
      throw InvalidArgument("fd_step must lie in (0,1)");
  }

  const std::string& name() const { return name_; }
  const Interval& domain() const { return domain_; }
  double fd_step() const { return fd_step_; }
  bool has_d1() const { return d1_.has_value(); }
  bool has_d2() const { return d2_.has_value(); }

  /// Evaluates f at x; x is snapped onto closed endpoints within the margin.
  double operator()(double x) const {
    double v = eval_(domain_.clamp_with_margin(x));
    if (!std::isfinite(v)) throw DomainViolation(name_ + " is not finite at " + std::to_string(x));
    return v;
  }

  double derivative(double x) const {
    x = domain_.clamp_with_margin(x);
    if (d1_) return (*d1_)(x);
    auto [lo_room, hi_room] = room(x);
    double h = fd_step_ * std::max(1.0, std::abs(x));
    if (lo_room > 0.0 && hi_room > 0.0) {
      h = std::min({h, 0.5 * lo_room, 0.5 * hi_room});
      return (eval_(x + h) - eval_(x - h)) / (2.0 * h);
    }
    if (hi_room > 0.0) {  // sitting on the lower endpoint
      h = std::min(h, 0.25 * hi_room);
      return (-3.0 * eval_(x) + 4.0 * eval_(x + h) - eval_(x + 2.0 * h)) / (2.0 * h);
    }
    h = std::min(h, 0.25 * lo_room);
    return (3.0 * eval_(x) - 4.0 * eval_(x - h) + eval_(x - 2.0 * h)) / (2.0 * h);
  }

  double second_derivative(double x) const {
    x = domain_.clamp_with_margin(x);
    if (d2_) return (*d2_)(x);
    auto [lo_room, hi_room] = room(x);
    double h = std::cbrt(fd_step_ * fd_step_) * std::max(1.0, std::abs(x));
    if (lo_room > 0.0 && hi_room > 0.0) {
      h = std::min({h, 0.5 * lo_room, 0.5 * hi_room});
      return (eval_(x + h) - 2.0 * eval_(x) + eval_(x - h)) / (h * h);
    }
    double s = hi_room > 0.0 ? 1.0 : -1.0;
    h = std::min(h, 0.25 * (hi_room > 0.0 ? hi_room : lo_room));
    return (2.0 * eval_(x) - 5.0 * eval_(x + s * h) + 4.0 * eval_(x + 2.0 * s * h) -
            eval_(x + 3.0 * s * h)) /
           (h * h);
  }

 private:
  // Distance to each endpoint measured so that x +/- room stays admissible.
  std::pair<double, double> room(double x) const {
    double lo_room = x - domain_.lo();
    double hi_room = domain_.hi() - x;
    return {lo_room, hi_room};
  }

  std::string name_;
  Interval domain_;
  Map eval_;
  std::optional<Map> d1_;
  std::optional<Map> d2_;
  double fd_step_;
};

}  // namespace loewner
