#include "wpc/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpc {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

Interval widen(double lo, double hi) { return {std::nextafter(lo, -kInfD), std::nextafter(hi, kInfD)}; }

}  // namespace

Interval Interval::enclose(const Rational& q) {
  double d = q.get_d();
  return widen(d, d);
}

double Interval::mag_lower() const {
  if (contains_zero()) return 0;
  return std::min(std::fabs(lo), std::fabs(hi));
}

double Interval::mag_upper() const { return std::max(std::fabs(lo), std::fabs(hi)); }

Interval operator+(Interval a, Interval b) { return widen(a.lo + b.lo, a.hi + b.hi); }
Interval operator-(Interval a, Interval b) { return widen(a.lo - b.hi, a.hi - b.lo); }
Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval operator*(Interval a, Interval b) {
  double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return widen(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
}

Interval pow(Interval a, int k) {
  if (k == 0) return Interval(1.0);
  if (k % 2 == 0) {
    // Even powers are nonnegative; evaluate on |a|.
    double lo = a.mag_lower(), hi = a.mag_upper();
    Interval m(lo, hi);
    Interval r(1.0);
    for (int i = 0; i < k; ++i) r = r * m;
    return {std::max(0.0, r.lo), r.hi};
  }
  Interval r = a;
  for (int i = 1; i < k; ++i) r = r * a;
  return r;
}

Interval evaluate(const WeightedPolynomial& f, std::span<const Interval> x) {
  Interval acc(0.0);
  for (const auto& [k, c] : f.terms()) {
    Interval t = Interval::enclose(c);
    for (std::size_t i = 0; i < k.size(); ++i)
      if (k[i] > 0) t = t * pow(x[i], k[i]);
    acc = acc + t;
  }
  return acc;
}

}  // namespace wpc
