#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <gmpxx.h>

/// Reference implementations written straight from the definitions. They share
/// no code with the library beyond GMP.
namespace oracle {

using i64 = std::int64_t;
using i128 = __int128;

/// ord_p(n) by repeated division; n != 0.
inline long valuation(mpz_class n, unsigned long p) {
  long k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  return k;
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) out.push_back(n);
  return out;
}

/// Positive generator of the largest fractional ideal 𝔞 with x_i ∈ 𝔞^{w_i} for all i:
/// for every prime, the largest k with p^{k w_i} dividing every nonzero x_i, found by search.
inline mpq_class scaling_ideal(const std::vector<mpq_class>& x, const std::vector<int>& w) {
  std::vector<std::uint64_t> primes;
  for (const auto& q : x) {
    if (q == 0) continue;
    for (const mpz_class& part : {mpz_class(abs(q.get_num())), mpz_class(q.get_den())})
      for (auto p : prime_divisors(part.get_ui())) primes.push_back(p);
  }
  mpq_class gen = 1;
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  for (auto p : primes) {
    auto fits = [&](long k) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        mpq_class y = x[i];
        for (long t = 0; t < std::labs(k) * w[i]; ++t) {
          if (k > 0) y /= p;
          else y *= p;
        }
        y.canonicalize();
        if (y.get_den() % p == 0) return false;
      }
      return true;
    };
    long k = 64;
    while (!fits(k)) --k;
    for (long t = 0; t < std::labs(k); ++t) {
      if (k > 0) gen *= p;
      else gen /= p;
    }
  }
  gen.canonicalize();
  return gen;
}

/// ζ(2) from 10^6 terms plus the Euler–Maclaurin tail 1/N - 1/(2N^2) + 1/(6N^3).
inline long double zeta2() {
  const long N = 1'000'000;
  long double s = 0;
  for (long n = N - 1; n >= 1; --n) s += 1.0L / (static_cast<long double>(n) * n);
  long double n = N;
  return s + 1 / n + 1 / (2 * n * n) + 1 / (6 * n * n * n);
}

/// One worked morphism, hand-coded.
struct Fixture {
  std::string file;
  std::array<int, 2> w;
  std::array<int, 2> u;
  std::function<std::array<i128, 2>(i128, i128)> phi;
  long max_discrepancy;  ///< largest discrepancy of the morphism
  /// Box |a| <= A(H), |b| <= B(H) containing every real (a, b) with |f_j| <= H^{u_j}.
  std::function<std::array<double, 2>(double)> box;
};

inline std::vector<Fixture> fixtures() {
  return {
      {"x1_2.json", {2, 4}, {4, 6},
       [](i128 a, i128 b) { return std::array<i128, 2>{a * a - 2 * b, 3 * a * b - a * a * a}; }, 2,
       [](double H) { return std::array<double, 2>{3 * H * H, 4 * H * H * H * H}; }},
      {"x1_3.json", {1, 3}, {4, 6},
       [](i128 a, i128 b) {
         return std::array<i128, 2>{a * a * a * a - 4 * a * b, -a * a * a * a * a * a + 6 * a * a * a * b - 6 * b * b};
       },
       1, [](double H) { return std::array<double, 2>{3 * H, 3 * H * H * H}; }},
      {"identity_p11.json", {1, 1}, {1, 1}, [](i128 a, i128 b) { return std::array<i128, 2>{a, b}; }, 1,
       [](double H) { return std::array<double, 2>{2 * H, 2 * H}; }},
      {"identity_p24.json", {2, 4}, {2, 4}, [](i128 a, i128 b) { return std::array<i128, 2>{a, b}; }, 1,
       [](double H) { return std::array<double, 2>{2 * H * H, 2 * H * H * H * H}; }},
  };
}

inline mpz_class big(i128 v) {
  bool neg = v < 0;
  unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(m >> 64)), lo(static_cast<unsigned long>(m & ~0ull));
  mpz_class r = hi * (mpz_class(1) << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

/// Positive generator of I_w(y) for an integer vector y != 0. Only primes dividing
/// every nonzero y_j can contribute; for each, the largest k with p^{k w_j} | y_j is searched.
inline mpz_class integral_scaling_ideal(const std::vector<mpz_class>& y, const std::vector<int>& w) {
  mpz_class g = 0;
  for (const auto& v : y) g = gcd(g, v);
  mpz_class gen = 1;
  for (auto p : prime_divisors(g.get_ui())) {
    long k = 0;
    for (;; ++k) {
      bool all = true;
      for (std::size_t j = 0; j < y.size() && all; ++j) {
        if (y[j] == 0) continue;
        mpz_class pk = 1;
        for (long t = 0; t < (k + 1) * w[j]; ++t) pk *= p;
        all = y[j] % pk == 0;
      }
      if (!all) break;
    }
    for (long t = 0; t < k; ++t) gen *= p;
  }
  return gen;
}

struct NaiveCount {
  mpq_class mass;
  std::map<long, mpq_class> by_discrepancy;
  long largest_discrepancy = 0;
};

/// Scans the whole box, keeps primitive canonical representatives and tests the
/// height S_u(φ(x)) = max_j |y_j|^{1/u_j} / N(I_u(y)) <= T exactly.
inline NaiveCount naive_count(const Fixture& f, const mpq_class& T) {
  NaiveCount out;
  double H = f.max_discrepancy * T.get_d();
  auto box = f.box(H);
  i64 A = static_cast<i64>(box[0]) + 1, B = static_cast<i64>(box[1]) + 1;
  for (i64 a = -A; a <= A; ++a)
    for (i64 b = -B; b <= B; ++b) {
      if (a == 0 && b == 0) continue;
      // primitive: no prime p with p^{w1} | a and p^{w2} | b
      std::uint64_t g = std::gcd(static_cast<std::uint64_t>(std::llabs(a)), static_cast<std::uint64_t>(std::llabs(b)));
      bool primitive = true;
      for (auto p : prime_divisors(g)) {
        bool da = a == 0 || valuation(mpz_class(static_cast<long>(a)), p) >= f.w[0];
        bool db = b == 0 || valuation(mpz_class(static_cast<long>(b)), p) >= f.w[1];
        if (da && db) primitive = false;
      }
      if (!primitive) continue;
      i64 na = (f.w[0] % 2) ? -a : a, nb = (f.w[1] % 2) ? -b : b;
      if (std::make_pair(na, nb) < std::make_pair(a, b)) continue;
      mpq_class weight(1, (na == a && nb == b) ? 2 : 1);
      auto y = f.phi(a, b);
      std::vector<mpz_class> yz = {big(y[0]), big(y[1])};
      mpz_class n = integral_scaling_ideal(yz, {f.u[0], f.u[1]});
      bool ok = true;
      for (int j = 0; j < 2 && ok; ++j) {
        mpz_class lhs = abs(yz[j]), rhs = 1;
        for (int k = 0; k < f.u[j]; ++k) {
          lhs *= T.get_den();
          rhs *= n * T.get_num();
        }
        ok = lhs <= rhs;
      }
      if (!ok) continue;
      out.mass += weight;
      out.by_discrepancy[n.get_si()] += weight;
      out.largest_discrepancy = std::max(out.largest_discrepancy, n.get_si());
    }
  return out;
}

}  // namespace oracle
