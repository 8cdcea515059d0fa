#pragma once

#include <span>

#include "wpc/arith.hpp"
#include "wpc/morphism.hpp"

namespace wpc {

/// Closed interval of doubles; every operation widens its result by one ulp on
/// each side, so the true real result is always enclosed.
struct Interval {
  double lo = 0;
  double hi = 0;

  Interval() = default;
  Interval(double a) : lo(a), hi(a) {}
  Interval(double a, double b) : lo(a), hi(b) {}
  static Interval enclose(const Rational& q);

  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  /// Lower bound of |x| over the interval.
  double mag_lower() const;
  double mag_upper() const;
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator-(Interval a);
Interval operator*(Interval a, Interval b);
Interval pow(Interval a, int k);

Interval evaluate(const WeightedPolynomial& f, std::span<const Interval> x);

}  // namespace wpc
