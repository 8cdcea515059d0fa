#include "wpc/arith.hpp"

#include <cmath>

namespace wpc {

namespace {

constexpr std::uint32_t kSieveLimit = 1000000;

std::vector<std::uint32_t> build_primes() {
  std::vector<bool> composite(kSieveLimit, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i < kSieveLimit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = std::uint64_t(i) * i; j < kSieveLimit; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace

const std::vector<std::uint32_t>& prime_table() {
  static const std::vector<std::uint32_t> primes = build_primes();
  return primes;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint32_t p : prime_table()) {
    if (std::uint64_t(p) * p > n) return true;
    if (n % p == 0) return n == p;
  }
  Integer z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(n), 0, 0, &n);
  return mpz_probab_prime_p(z.get_mpz_t(), 40) > 0;
}

std::map<std::uint64_t, int> factor(const Integer& n) {
  if (n == 0) throw DomainError("factor: zero has no factorization");
  Integer m = abs(n);
  std::map<std::uint64_t, int> out;
  for (std::uint32_t p : prime_table()) {
    if (m == 1) break;
    if (Integer(p) * p > m) break;
    if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      int e = 0;
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        ++e;
      }
      out[p] = e;
    }
  }
  if (m != 1) {
    // m has no factor below min(sieve, sqrt m); it is prime if m < sieve^2.
    Integer bound = Integer(kSieveLimit) * kSieveLimit;
    if (m >= bound || !m.fits_ulong_p())
      throw FactorizationError("factor: cofactor " + m.get_str() +
                               " has no prime factor below 10^6; larger factors are not supported");
    out[m.get_ui()] += 1;
  }
  return out;
}

std::map<std::uint64_t, int> factor_u64(std::uint64_t n) {
  if (n == 0) throw DomainError("factor: zero has no factorization");
  std::map<std::uint64_t, int> out;
  for (std::uint32_t p : prime_table()) {
    if (std::uint64_t(p) * p > n) break;
    while (n % p == 0) {
      n /= p;
      ++out[p];
    }
  }
  if (n > 1) {
    if (n >= std::uint64_t(kSieveLimit) * kSieveLimit)
      throw FactorizationError("factor: cofactor " + std::to_string(n) + " too large");
    ++out[n];
  }
  return out;
}

long valuation(const Integer& x, std::uint64_t p) {
  if (x == 0) throw DomainError("valuation: ord_p(0) is infinite");
  if (p < 2) throw DomainError("valuation: p must be prime");
  if (p == 2) return static_cast<long>(mpz_scan1(x.get_mpz_t(), 0));
  Integer m = x;
  long e = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
    ++e;
  }
  return e;
}

long valuation(const Rational& x, std::uint64_t p) {
  if (x == 0) throw DomainError("valuation: ord_p(0) is infinite");
  return valuation(Integer(x.get_num()), p) - valuation(Integer(x.get_den()), p);
}

int moebius(std::uint64_t n) {
  if (n == 0) throw DomainError("moebius: n must be positive");
  int mu = 1;
  for (auto [p, e] : factor_u64(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::vector<std::int8_t> moebius_table(std::uint64_t n) {
  std::vector<std::int8_t> mu(n + 1, 1);
  std::vector<bool> composite(n + 1, false);
  mu[0] = 0;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i; j <= n; j += i) {
      if (j > i) composite[j] = true;
      mu[j] = static_cast<std::int8_t>(-mu[j]);
    }
    if (i <= n / i)
      for (std::uint64_t j = i * i; j <= n; j += i * i) mu[j] = 0;
  }
  return mu;
}

Rational bernoulli(int n) {
  if (n < 0) throw DomainError("bernoulli: negative index");
  // Akiyama–Tanigawa gives B_n with B_1 = +1/2; fix the sign below.
  std::vector<Rational> a(n + 1);
  for (int m = 0; m <= n; ++m) {
    a[m] = Rational(1, m + 1);
    for (int j = m; j >= 1; --j) {
      a[j - 1] = j * (a[j - 1] - a[j]);
      a[j - 1].canonicalize();
    }
  }
  Rational b = a[0];
  if (n == 1) b = -b;
  return b;
}

long double zeta_q(int s) {
  if (s < 2) throw DomainError("zeta_q: s must be at least 2");
  if (s % 2 == 1) {
    // Odd s: Euler–Maclaurin with N = 16 and six correction terms.
    const int N = 16;
    long double sum = 0;
    for (int n = 1; n < N; ++n) sum += std::pow(static_cast<long double>(n), -s);
    long double x = N;
    sum += std::pow(x, 1 - s) / (s - 1) + std::pow(x, -s) / 2;
    long double rising = s, fact = 1;
    for (int k = 1; k <= 6; ++k) {
      fact *= (2 * k - 1) * (2 * k);
      sum += to_long_double(bernoulli(2 * k)) / fact * rising * std::pow(x, -s - 2 * k + 1);
      rising *= (s + 2 * k - 1) * (s + 2 * k);
    }
    return sum;
  }
  // ζ(2k) = (-1)^{k+1} B_{2k} (2π)^{2k} / (2 (2k)!)
  Rational b = bernoulli(s);
  Integer fact = 1;
  for (int i = 2; i <= s; ++i) fact *= i;
  Rational coeff = abs(b) / (2 * Rational(fact));
  const long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
  return to_long_double(coeff) * std::pow(two_pi, static_cast<long double>(s));
}

FactoredRational::FactoredRational(const Rational& x) {
  if (x == 0) throw DomainError("FactoredRational: zero is not allowed");
  sign_ = sgn(x) < 0 ? -1 : 1;
  for (auto [p, e] : factor(x.get_num())) exps_[p] += e;
  for (auto [p, e] : factor(x.get_den())) exps_[p] -= e;
}

FactoredRational FactoredRational::from_exponents(std::map<std::uint64_t, long> exps, int sign) {
  FactoredRational f;
  f.sign_ = sign < 0 ? -1 : 1;
  for (auto [p, e] : exps) {
    if (!is_prime(p)) throw DomainError("FactoredRational: key " + std::to_string(p) + " is not prime");
    f.set(p, e);
  }
  return f;
}

void FactoredRational::set(std::uint64_t p, long e) {
  if (e == 0)
    exps_.erase(p);
  else
    exps_[p] = e;
}

long FactoredRational::exponent(std::uint64_t p) const {
  auto it = exps_.find(p);
  return it == exps_.end() ? 0 : it->second;
}

Rational FactoredRational::value() const {
  Integer num = 1, den = 1;
  for (auto [p, e] : exps_) {
    Integer pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), p, static_cast<unsigned long>(e > 0 ? e : -e));
    (e > 0 ? num : den) *= pp;
  }
  Rational q(num * sign_, den);
  q.canonicalize();
  return q;
}

Rational FactoredRational::norm() const { return ideal().value(); }

bool FactoredRational::is_integral() const {
  for (auto [p, e] : exps_)
    if (e < 0) return false;
  return true;
}

FactoredRational FactoredRational::operator*(const FactoredRational& o) const {
  FactoredRational r = *this;
  r.sign_ = sign_ * o.sign_;
  for (auto [p, e] : o.exps_) r.set(p, r.exponent(p) + e);
  return r;
}

FactoredRational FactoredRational::operator/(const FactoredRational& o) const {
  FactoredRational r = *this;
  r.sign_ = sign_ * o.sign_;
  for (auto [p, e] : o.exps_) r.set(p, r.exponent(p) - e);
  return r;
}

FactoredRational FactoredRational::pow(long k) const {
  FactoredRational r;
  r.sign_ = (k % 2 != 0) ? sign_ : 1;
  for (auto [p, e] : exps_) r.set(p, e * k);
  return r;
}

FactoredRational FactoredRational::ideal() const {
  FactoredRational r = *this;
  r.sign_ = 1;
  return r;
}

std::string FactoredRational::to_string() const { return wpc::to_string(value()); }

const FieldContext& FieldContext::rationals() {
  static const FieldContext q;
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  auto dot = s.find('.');
  auto e = s.find_first_of("eE");
  if (e != std::string::npos) throw std::invalid_argument("exponent notation not supported: " + text);
  Rational q;
  if (dot != std::string::npos) {
    if (slash != std::string::npos) throw std::invalid_argument("bad rational: " + text);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("bad rational: " + text);
    if (digits[0] == '+') digits.erase(0, 1);
    Integer num, den;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad rational: " + text);
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    q = Rational(num, den);
  } else {
    if (s[0] == '+') s.erase(0, 1);
    if (q.set_str(s, 10) != 0 || (slash != std::string::npos && q.get_den() == 0))
      throw std::invalid_argument("bad rational: " + text);
  }
  q.canonicalize();
  return q;
}

long double log_abs(const Integer& n) {
  if (n == 0) throw DomainError("log of zero");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::log(std::fabs(static_cast<long double>(mant))) + exp2 * std::log(2.0L);
}

long double to_long_double(const Rational& q) {
  if (q == 0) return 0.0L;
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p())
    return static_cast<long double>(q.get_num().get_si()) / static_cast<long double>(q.get_den().get_si());
  // Scale to a 64-bit integer quotient, then rebuild the exponent.
  Integer num = abs(q.get_num());
  const Integer& den = q.get_den();
  long shift = 64 - (static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                     static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)));
  Integer m;
  if (shift >= 0)
    m = (num << shift) / den;
  else
    m = num / (den << -shift);
  Integer hi = m >> 32;
  Integer lo = m - (hi << 32);
  long double r = std::ldexp(static_cast<long double>(hi.get_ui()), 32) + static_cast<long double>(lo.get_ui());
  r = std::ldexp(r, static_cast<int>(-shift));
  return sgn(q) < 0 ? -r : r;
}

}  // namespace wpc
