#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace wpc {

using Integer = mpz_class;
using Rational = mpq_class;

/// Raised for arguments outside an operation's domain (valuation of 0, μ(0), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when trial division by the cached sieve cannot finish a factorization.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primes below 10^6, built once.
const std::vector<std::uint32_t>& prime_table();

bool is_prime(std::uint64_t n);

/// Prime factorization of |n| for n != 0. Cofactors above the sieve square are
/// accepted only when below 10^12 (hence prime); otherwise FactorizationError.
std::map<std::uint64_t, int> factor(const Integer& n);
std::map<std::uint64_t, int> factor_u64(std::uint64_t n);

long valuation(const Integer& x, std::uint64_t p);
long valuation(const Rational& x, std::uint64_t p);

int moebius(std::uint64_t n);

/// Möbius values for 0..n (index 0 unused).
std::vector<std::int8_t> moebius_table(std::uint64_t n);

/// Exact Bernoulli number B_n with B_1 = -1/2.
Rational bernoulli(int n);

/// Riemann zeta at s >= 2: Bernoulli closed form for even s, Euler–Maclaurin for odd s.
long double zeta_q(int s);

/// Floor division for signed integers.
inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// A nonzero rational kept as sign and prime exponents. Also read as the
/// fractional ideal it generates, in which case the sign is ignored.
class FactoredRational {
 public:
  FactoredRational() = default;
  explicit FactoredRational(const Rational& x);
  static FactoredRational from_exponents(std::map<std::uint64_t, long> exps, int sign = 1);

  int sign() const { return sign_; }
  const std::map<std::uint64_t, long>& exponents() const { return exps_; }
  long exponent(std::uint64_t p) const;

  Rational value() const;
  /// Positive generator of the ideal.
  Rational norm() const;
  bool is_unit_ideal() const { return exps_.empty(); }
  bool is_integral() const;

  FactoredRational operator*(const FactoredRational& o) const;
  FactoredRational operator/(const FactoredRational& o) const;
  FactoredRational pow(long k) const;
  FactoredRational ideal() const;  ///< same exponents, sign +1

  bool operator==(const FactoredRational& o) const = default;
  std::string to_string() const;

 private:
  void set(std::uint64_t p, long e);
  int sign_ = 1;
  std::map<std::uint64_t, long> exps_;
};

/// ℚ as the only supported base field.
struct FieldContext {
  int degree = 1;
  int real_places = 1;
  int complex_places = 0;
  long discriminant = 1;
  int roots_of_unity = 2;
  int class_number = 1;

  static const FieldContext& rationals();

 private:
  FieldContext() = default;
};

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);  ///< "p", "p/q" or a decimal like "1.5"
long double to_long_double(const Rational& q);
long double log_abs(const Integer& n);

}  // namespace wpc
