#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "loewner/errors.hpp"

namespace loewner {

/// Margin by which a numerically computed point may overshoot a closed
/// endpoint: 1e-12 * max(1, |endpoint|).
inline constexpr double kEndpointMargin = 1e-12;

/**
 * @brief A real interval with possibly infinite endpoints.
 *
 * Infinite endpoints are always open. Degenerate intervals (lo >= hi) are
 * rejected at construction.
 */
class Interval {
 public:
  Interval(double lo, double hi, bool lo_closed, bool hi_closed)
      : lo_(lo), hi_(hi), lo_closed_(lo_closed && std::isfinite(lo)),
        hi_closed_(hi_closed && std::isfinite(hi)) {
    if (std::isnan(lo) || std::isnan(hi))
      throw InvalidArgument("interval endpoint is NaN");
    if (!(lo < hi)) {
      std::ostringstream os;
      os << "degenerate interval: lo=" << lo << " hi=" << hi;
      throw InvalidArgument(os.str());
    }
  }

  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval closed_open(double lo, double hi) { return {lo, hi, true, false}; }
  static Interval open_closed(double lo, double hi) { return {lo, hi, false, true}; }
  static Interval real_line() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf, false, false};
  }
  static Interval nonnegative() {
    return {0.0, std::numeric_limits<double>::infinity(), true, false};
  }
  static Interval positive() {
    return {0.0, std::numeric_limits<double>::infinity(), false, false};
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }
  bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }
  double width() const { return hi_ - lo_; }
  double midpoint() const {
    if (bounded()) return 0.5 * (lo_ + hi_);
    if (std::isfinite(lo_)) return lo_ + 1.0;
    if (std::isfinite(hi_)) return hi_ - 1.0;
    return 0.0;
  }

  bool contains(double x) const {
    if (std::isnan(x)) return false;
    bool above = lo_closed_ ? x >= lo_ : x > lo_;
    bool below = hi_closed_ ? x <= hi_ : x < hi_;
    return above && below;
  }

  bool contains_interior(double x) const { return x > lo_ && x < hi_; }

  /**
   * Snaps x onto the interval when it overshoots a closed endpoint by at most
   * the endpoint margin. Throws DomainViolation otherwise.
   */
  double clamp_with_margin(double x) const {
    if (contains(x)) return x;
    if (lo_closed_ && x < lo_ && lo_ - x <= kEndpointMargin * std::max(1.0, std::abs(lo_)))
      return lo_;
    if (hi_closed_ && x > hi_ && x - hi_ <= kEndpointMargin * std::max(1.0, std::abs(hi_)))
      return hi_;
    std::ostringstream os;
    os.precision(17);
    os << "point " << x << " outside domain " << to_string();
    throw DomainViolation(os.str());
  }

  /// True when every point of `inner` is a point of this interval.
  bool includes(const Interval& inner) const {
    bool lo_ok = inner.lo_ > lo_ || (inner.lo_ == lo_ && (lo_closed_ || !inner.lo_closed_));
    bool hi_ok = inner.hi_ < hi_ || (inner.hi_ == hi_ && (hi_closed_ || !inner.hi_closed_));
    return lo_ok && hi_ok;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << (lo_closed_ ? '[' : '(') << lo_ << ',' << hi_ << (hi_closed_ ? ']' : ')');
    return os.str();
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
  bool lo_closed_;
  bool hi_closed_;
};

}  // namespace loewner
