#include "wpc/weighted_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wpc {

WeightVector::WeightVector(std::vector<int> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("weight vector must be nonempty");
  for (int wi : w_)
    if (wi < 1) throw std::invalid_argument("weights must be positive integers");
}

int WeightVector::total() const {
  int s = 0;
  for (int wi : w_) s += wi;
  return s;
}

int WeightVector::min() const { return *std::min_element(w_.begin(), w_.end()); }

bool WeightVector::all_even() const {
  return std::all_of(w_.begin(), w_.end(), [](int wi) { return wi % 2 == 0; });
}

WeightedPoint::WeightedPoint(std::vector<Rational> coords, WeightVector w) : x_(std::move(coords)), w_(std::move(w)) {
  if (x_.size() != w_.size()) throw std::invalid_argument("point and weight vector differ in length");
  if (std::all_of(x_.begin(), x_.end(), [](const Rational& q) { return sgn(q) == 0; }))
    throw std::invalid_argument("the zero tuple is not a point");
  for (auto& q : x_) q.canonicalize();
}

WeightedPoint WeightedPoint::from_integers(std::span<const long> coords, WeightVector w) {
  std::vector<Rational> x;
  for (long c : coords) x.emplace_back(c);
  return WeightedPoint(std::move(x), std::move(w));
}

bool WeightedPoint::has_integer_coords() const {
  return std::all_of(x_.begin(), x_.end(), [](const Rational& q) { return q.get_den() == 1; });
}

WeightedPoint WeightedPoint::scale(const Rational& lambda) const {
  if (sgn(lambda) == 0) throw DomainError("scale: λ must be nonzero");
  std::vector<Rational> y(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    Rational p = 1;
    for (int k = 0; k < w_[i]; ++k) p *= lambda;
    y[i] = p * x_[i];
  }
  return WeightedPoint(std::move(y), w_);
}

FactoredRational scaling_ideal(const WeightedPoint& x) {
  // Only primes dividing every numerator or some denominator can have a
  // nonzero exponent; elsewhere some coordinate is a p-adic unit.
  Integer g = 0;
  std::set<std::uint64_t> primes;
  for (const auto& q : x.coords()) {
    if (sgn(q) == 0) continue;
    g = gcd(g, Integer(q.get_num()));
    for (auto [p, e] : factor(q.get_den())) primes.insert(p);
  }
  for (auto [p, e] : factor(g)) primes.insert(p);
  std::map<std::uint64_t, long> exps;
  for (std::uint64_t p : primes) {
    bool first = true;
    long best = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (sgn(x[i]) == 0) continue;
      long v = floor_div(valuation(x[i], p), x.weights()[i]);
      if (first || v < best) best = v;
      first = false;
    }
    if (best != 0) exps[p] = best;
  }
  return FactoredRational::from_exponents(std::move(exps));
}

WeightedPoint normalize_primitive(const WeightedPoint& x) {
  Rational q = scaling_ideal(x).norm();
  return x.scale(1 / q);
}

long double archimedean_size(const WeightedPoint& x) {
  long double best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) == 0) continue;
    long double lg = (log_abs(x[i].get_num()) - log_abs(x[i].get_den())) / x.weights()[i];
    best = std::max(best, std::exp(lg));
  }
  return best;
}

long double height(const WeightedPoint& x) {
  return archimedean_size(x) / to_long_double(scaling_ideal(x).norm());
}

bool height_at_most(const WeightedPoint& x, const Rational& T) {
  if (sgn(T) <= 0) return false;
  // |x_i|^{1/w_i} <= T·N  iff  |x_i| <= (T·N)^{w_i}
  Rational bound = T * scaling_ideal(x).norm();
  for (std::size_t i = 0; i < x.size(); ++i) {
    Rational p = 1;
    for (int k = 0; k < x.weights()[i]; ++k) p *= bound;
    if (abs(x[i]) > p) return false;
  }
  return true;
}

int automorphism_count(const WeightedPoint& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.weights()[i] % 2 == 1 && sgn(x[i]) != 0) return 1;
  return 2;
}

WeightedPoint canonical_orbit_rep(const WeightedPoint& x) {
  WeightedPoint y = x.scale(-1);
  return std::lexicographical_compare(y.coords().begin(), y.coords().end(), x.coords().begin(), x.coords().end())
             ? y
             : x;
}

}  // namespace wpc
