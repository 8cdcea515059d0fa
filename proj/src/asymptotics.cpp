#include "wpc/asymptotics.hpp"

#include <cmath>

namespace wpc {

namespace {

/// d^{n/e} for a positive rational d; d must be a perfect e-th power.
Rational rational_power(const Rational& d, int n, int e) {
  FactoredRational f(d);
  std::map<std::uint64_t, long> out;
  for (auto [p, k] : f.exponents()) {
    if ((k * n) % e != 0)
      throw DomainError("c_phi: d^{|w|/e} is not rational for d = " + d.get_str());
    out[p] = k * n / e;
  }
  return FactoredRational::from_exponents(out).value();
}

}  // namespace

Rational c_phi(const GlobalAnalysis& analysis, const MorphismSpec& spec) {
  int total = spec.source.total();
  Rational sum = 0;
  for (const auto& [key, count] : analysis.census) {
    const auto& [d, c1] = key;
    if (count == 0) continue;
    int mu = moebius(c1.get_ui());
    if (mu == 0) continue;
    Rational term = rational_power(d, total, spec.e) * Rational(count) / Rational(analysis.modulus_index.at(c1));
    sum += mu > 0 ? term : Rational(-term);
  }
  for (std::uint64_t p : analysis.bad_primes) {
    Integer q;
    mpz_ui_pow_ui(q.get_mpz_t(), p, total);
    sum *= Rational(q, q - 1);
  }
  sum.canonicalize();
  return sum;
}

AsymptoticPrediction leading_constant(const Rational& cphi, long double volume, const MorphismSpec& spec) {
  const auto& K = FieldContext::rationals();
  AsymptoticPrediction a;
  a.c_phi = cphi;
  a.volume = volume;
  int total = spec.source.total();
  long double archimedean = std::pow(std::pow(2.0L, K.complex_places) / std::sqrt(static_cast<long double>(K.discriminant)),
                                     static_cast<long double>(spec.dim()));
  a.leading_constant = archimedean * to_long_double(cphi) * volume / (zeta_q(total) * K.roots_of_unity);
  a.exponent = Rational(total, spec.e);
  a.exponent.canonicalize();
  a.error_exponent = a.exponent - Rational(spec.source.min(), spec.e * K.degree);
  a.error_exponent.canonicalize();
  const auto& w = spec.source.values();
  a.special_log = (w == std::vector<int>{1, 1}) || (w == std::vector<int>{2});
  return a;
}

}  // namespace wpc
