#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "wpc/arith.hpp"

namespace wpc {

class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<int> w);
  WeightVector(std::initializer_list<int> w) : WeightVector(std::vector<int>(w)) {}

  std::size_t size() const { return w_.size(); }
  int operator[](std::size_t i) const { return w_[i]; }
  const std::vector<int>& values() const { return w_; }
  int total() const;  ///< |w|
  int min() const;
  bool all_even() const;

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<int> w_;
};

/// A point of ℙ(w)(ℚ) given by one representative.
class WeightedPoint {
 public:
  WeightedPoint(std::vector<Rational> coords, WeightVector w);
  static WeightedPoint from_integers(std::span<const long> coords, WeightVector w);

  const std::vector<Rational>& coords() const { return x_; }
  const Rational& operator[](std::size_t i) const { return x_[i]; }
  const WeightVector& weights() const { return w_; }
  std::size_t size() const { return x_.size(); }
  bool has_integer_coords() const;

  /// λ_* x = (λ^{w_i} x_i).
  WeightedPoint scale(const Rational& lambda) const;

  bool operator==(const WeightedPoint&) const = default;

 private:
  std::vector<Rational> x_;
  WeightVector w_;
};

/// I_w(x): exponent min_i floor(ord_p(x_i)/w_i) over nonzero coordinates.
FactoredRational scaling_ideal(const WeightedPoint& x);

/// Representative with scaling ideal (1), obtained by scaling with the inverse
/// positive generator. Integer coordinates follow.
WeightedPoint normalize_primitive(const WeightedPoint& x);

/// Archimedean part max_i |x_i|^{1/w_i}.
long double archimedean_size(const WeightedPoint& x);
/// S_w(x) = archimedean_size(x) / N(I_w(x)).
long double height(const WeightedPoint& x);
/// Exact test S_w(x) <= T.
bool height_at_most(const WeightedPoint& x, const Rational& T);

int automorphism_count(const WeightedPoint& x);

/// Lexicographically smaller of x and (-1)_* x.
WeightedPoint canonical_orbit_rep(const WeightedPoint& x);

}  // namespace wpc
