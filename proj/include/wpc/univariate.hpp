#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "wpc/arith.hpp"

namespace wpc {

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(long double x) { return x == 0.0L; }
inline bool is_zero(double x) { return x == 0.0; }

/// Dense univariate polynomial, coefficients stored from degree 0 upward.
template <class Scalar>
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }
  UPoly(std::initializer_list<Scalar> coeffs) : c_(coeffs) { trim(); }

  static UPoly constant(const Scalar& c) { return UPoly(std::vector<Scalar>{c}); }
  static UPoly monomial(const Scalar& c, int k) {
    std::vector<Scalar> v(k + 1);
    v[k] = c;
    return UPoly(std::move(v));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(int k) const { return (k >= 0 && k <= degree()) ? c_[k] : Scalar(); }
  const Scalar& leading() const { return c_.back(); }

  template <class X>
  X operator()(const X& x) const {
    X acc = X();
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  UPoly derivative() const {
    std::vector<Scalar> d;
    for (int k = 1; k <= degree(); ++k) d.push_back(c_[k] * Scalar(k));
    return UPoly(std::move(d));
  }

  UPoly operator-() const {
    UPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  UPoly operator+(const UPoly& o) const {
    std::vector<Scalar> v(std::max(c_.size(), o.c_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i < c_.size()) v[i] = v[i] + c_[i];
      if (i < o.c_.size()) v[i] = v[i] + o.c_[i];
    }
    return UPoly(std::move(v));
  }
  UPoly operator-(const UPoly& o) const { return *this + (-o); }
  UPoly operator*(const UPoly& o) const {
    if (zero() || o.zero()) return UPoly();
    std::vector<Scalar> v(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) v[i + j] = v[i + j] + c_[i] * o.c_[j];
    return UPoly(std::move(v));
  }
  UPoly scaled(const Scalar& s) const {
    std::vector<Scalar> v = c_;
    for (auto& x : v) x = x * s;
    return UPoly(std::move(v));
  }

  bool operator==(const UPoly& o) const { return c_ == o.c_; }

 private:
  void trim() {
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

template <class Scalar>
bool is_zero(const UPoly<Scalar>& p) {
  return p.zero();
}

using QPoly = UPoly<Rational>;
using RealPoly = UPoly<long double>;
/// Polynomial in an outer variable whose coefficients are polynomials in an inner one.
using QBiPoly = UPoly<QPoly>;

std::pair<QPoly, QPoly> divrem(const QPoly& a, const QPoly& b);
/// Exact quotient; throws if b does not divide a.
QPoly divexact(const QPoly& a, const QPoly& b);
/// Monic gcd (zero if both inputs are zero).
QPoly gcd(QPoly a, QPoly b);
QPoly squarefree_part(const QPoly& p);
/// Resultant of two polynomials over ℚ.
Rational resultant(const QPoly& f, const QPoly& g);
/// Resultant in the outer variable of a bivariate pair; a polynomial in the inner variable.
QPoly resultant(const QBiPoly& f, const QBiPoly& g);
QBiPoly derivative_outer(const QBiPoly& f);

RealPoly to_real(const QPoly& p);

/// Half-open isolating interval (lo, hi]; lo == hi marks an exact rational root.
struct RootBracket {
  Rational lo;
  Rational hi;
};

/// Number of distinct real roots in (lo, hi], by a Sturm sequence.
int count_real_roots(const QPoly& p, const Rational& lo, const Rational& hi);
/// Certified isolation of all distinct real roots, ascending.
std::vector<RootBracket> isolate_real_roots(const QPoly& p);
/// Bisects an isolating bracket with exact sign tests until it is narrower than tol.
RootBracket refine_root(const QPoly& p, RootBracket b, const Rational& tol);
/// Isolated roots refined to long double precision.
std::vector<long double> certified_real_roots(const QPoly& p);

/// Real roots of a floating polynomial by derivative recursion and bisection. Simple
/// roots are returned; a tangential double root is reported only when the polynomial
/// vanishes exactly at the critical point.
std::vector<long double> real_roots(const RealPoly& p);

}  // namespace wpc
