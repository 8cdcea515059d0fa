#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpc/arith.hpp"
#include "wpc/univariate.hpp"
#include "wpc/weighted_space.hpp"

namespace wpc {

/// Malformed config or polynomial text; the message carries the location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The polynomials do not define a morphism. condition 1 is the degree
/// condition, condition 2 the absence of common zeros off the origin.
class InvalidMorphism : public std::runtime_error {
 public:
  InvalidMorphism(int condition, const std::string& what) : std::runtime_error(what), condition_(condition) {}
  int condition() const { return condition_; }

 private:
  int condition_;
};

using Exponents = std::vector<int>;

/// Sparse polynomial in x1..xm with rational coefficients.
class WeightedPolynomial {
 public:
  WeightedPolynomial() = default;
  WeightedPolynomial(std::map<Exponents, Rational> terms, WeightVector w);

  const std::map<Exponents, Rational>& terms() const { return terms_; }
  const WeightVector& weights() const { return w_; }
  bool zero() const { return terms_.empty(); }
  /// Weighted degree; -1 for the zero polynomial.
  int degree() const { return degree_; }

  Rational operator()(std::span<const Rational> x) const;
  Integer evaluate_scaled(std::span<const Integer> x) const;  ///< D·f(x), D = denominator()
  long double evaluate(std::span<const long double> x) const;

  /// Least common denominator of the coefficients.
  Integer denominator() const;

  /// For m = 2: f(1, t) when fixed = 0, f(s, 1) when fixed = 1.
  QPoly dehomogenize(std::size_t fixed) const;
  /// For m = 2: a polynomial in x2 with coefficients in ℚ[x1].
  QBiPoly as_bivariate() const;

  std::string to_string() const;

 private:
  std::map<Exponents, Rational> terms_;
  WeightVector w_;
  int degree_ = -1;
};

/// Parses text like "x1^2 - 2*x2" or "-a^6"-style expressions over x1..xm.
WeightedPolynomial parse_polynomial(const std::string& text, const WeightVector& w);

struct MorphismSpec {
  std::string name;
  WeightVector source;
  WeightVector target;
  std::vector<WeightedPolynomial> polys;
  int e = 0;

  std::size_t dim() const { return source.size(); }
};

/// Checks lengths and weighted homogeneity and infers e. Throws InvalidMorphism.
MorphismSpec make_morphism(std::string name, WeightVector w, WeightVector u, std::vector<WeightedPolynomial> polys);

struct CommonZeroVerdict {
  bool pass = false;
  std::string witness;
};

CommonZeroVerdict validate_no_common_zero(const MorphismSpec& spec);

/// JSON config to a validated spec (degree and common-zero conditions).
MorphismSpec parse_morphism(const std::string& json_text);
MorphismSpec load_morphism(const std::string& path);
/// Parse without the common-zero check, for reporting.
MorphismSpec parse_morphism_unchecked(const std::string& json_text);

WeightedPoint evaluate(const MorphismSpec& spec, const WeightedPoint& x);

/// Multiplies f_i by c^{u_i}; the same morphism on ℙ(w) → ℙ(u).
MorphismSpec rescale_representative(const MorphismSpec& spec, const Rational& c);

std::string read_file(const std::string& path);

}  // namespace wpc
