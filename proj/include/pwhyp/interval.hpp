#pragma once

// Closed real intervals with outward rounding. Every arithmetic result is
// widened by one ulp on each side, which encloses the exact result of the
// round-to-nearest operation on the endpoints.

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwhyp {

class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double point) : lo_(point), hi_(point) {}  // NOLINT: implicit point interval
  constexpr Interval(double lo, double hi) : lo_(lo), hi_(hi) {}

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }
  constexpr double width() const { return hi_ - lo_; }
  constexpr bool contains(double x) const { return lo_ <= x && x <= hi_; }
  constexpr bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  constexpr bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }

  static Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return widen(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return widen(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return widen(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
  }
  // Caller guarantees 0 is not in b.
  friend Interval operator/(const Interval& a, const Interval& b) {
    const double q1 = a.lo_ / b.lo_, q2 = a.lo_ / b.hi_, q3 = a.hi_ / b.lo_, q4 = a.hi_ / b.hi_;
    return widen(std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4}));
  }

 private:
  static Interval widen(double lo, double hi) {
    const double inf = std::numeric_limits<double>::infinity();
    return {std::nextafter(lo, -inf), std::nextafter(hi, inf)};
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval sqr(const Interval& a) {
  if (a.contains_zero()) {
    const double m = std::max(a.lo() * a.lo(), a.hi() * a.hi());
    return {0.0, std::nextafter(m, std::numeric_limits<double>::infinity())};
  }
  return a * a;
}

}  // namespace pwhyp
