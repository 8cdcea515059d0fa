#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wpc/enumeration.hpp"
#include "wpc/local_analysis.hpp"

using namespace wpc;

namespace {

const std::string kFixtures = FIXTURE_DIR;
constexpr int kCases = 1000;

/// Small random generator of test data.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  long integer(long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }
  Rational rational(long bound, long den_bound) {
    Rational q(integer(-bound, bound), integer(1, den_bound));
    q.canonicalize();
    return q;
  }
  Rational nonzero_rational(long bound, long den_bound) {
    for (;;) {
      Rational q = rational(bound, den_bound);
      if (sgn(q) != 0) return q;
    }
  }
  WeightedPoint point(const WeightVector& w) {
    for (;;) {
      std::vector<Rational> x;
      for (std::size_t i = 0; i < w.size(); ++i) x.push_back(integer(0, 3) == 0 ? Rational(0) : rational(60, 24));
      bool all_zero = true;
      for (auto& q : x) all_zero = all_zero && sgn(q) == 0;
      if (!all_zero) return WeightedPoint(x, w);
    }
  }
  WeightVector weights() {
    std::vector<int> w;
    int m = static_cast<int>(integer(1, 4));
    for (int i = 0; i < m; ++i) w.push_back(static_cast<int>(integer(1, 6)));
    return WeightVector(w);
  }
};

std::vector<MorphismSpec> specs() {
  std::vector<MorphismSpec> out;
  for (auto f : {"x1_2.json", "x1_3.json", "identity_p11.json", "identity_p24.json"})
    out.push_back(load_morphism(kFixtures + "/" + f));
  out.push_back(parse_morphism(
      R"({"name":"sq11","source_weights":[1,1],"target_weights":[1,1],"polynomials":["x1^2 - x2^2","x1*x2"]})"));
  return out;
}

}  // namespace

TEST_CASE("scaling ideal is multiplicative under the weighted action") {
  Gen g(101);
  for (int i = 0; i < kCases; ++i) {
    WeightVector w = g.weights();
    WeightedPoint x = g.point(w);
    Rational lambda = g.nonzero_rational(12, 12);
    auto Ix = scaling_ideal(x);
    CHECK(Ix.norm() == oracle::scaling_ideal(x.coords(), w.values()));
    CHECK(scaling_ideal(x.scale(lambda)) == (Ix * FactoredRational(lambda)).ideal());
  }
}

TEST_CASE("height is invariant under the weighted action") {
  Gen g(102);
  for (int i = 0; i < kCases; ++i) {
    WeightVector w = g.weights();
    WeightedPoint x = g.point(w);
    WeightedPoint y = x.scale(g.nonzero_rational(20, 20));
    CHECK(height(y) == doctest::Approx(static_cast<double>(height(x))).epsilon(1e-12));
    Rational T = g.nonzero_rational(40, 7);
    if (sgn(T) < 0) T = -T;
    CHECK(height_at_most(x, T) == height_at_most(y, T));
  }
}

TEST_CASE("morphisms are equivariant") {
  Gen g(103);
  auto all = specs();
  for (int i = 0; i < kCases; ++i) {
    const auto& spec = all[i % all.size()];
    WeightedPoint x = g.point(spec.source);
    Rational lambda = g.nonzero_rational(9, 9);
    Rational le = 1;
    for (int k = 0; k < spec.e; ++k) le *= lambda;
    bool zero_image = false;
    try {
      evaluate(spec, x);
    } catch (const std::logic_error&) {
      zero_image = true;
    }
    REQUIRE_FALSE(zero_image);
    CHECK(evaluate(spec, x.scale(lambda)) == evaluate(spec, x).scale(le));
  }
}

TEST_CASE("discrepancy is invariant under the weighted action") {
  Gen g(104);
  auto all = specs();
  for (int i = 0; i < kCases; ++i) {
    const auto& spec = all[i % all.size()];
    WeightedPoint x = g.point(spec.source);
    CHECK(discrepancy(spec, x.scale(g.nonzero_rational(15, 15))).ideal() == discrepancy(spec, x).ideal());
  }
}

TEST_CASE("discrepancy agrees with the local profiles on the primitive box [-200,200]^2") {
  for (auto f : {"x1_2.json", "x1_3.json"}) {
    auto spec = load_morphism(kFixtures + "/" + f);
    auto an = global_analysis(spec);
    long checked = 0;
    for (long a = -200; a <= 200; ++a)
      for (long b = -200; b <= 200; ++b) {
        if (a == 0 && b == 0) continue;
        long x[2] = {a, b};
        auto p = WeightedPoint::from_integers(std::span<const long>(x, 2), spec.source);
        if (!scaling_ideal(p).is_unit_ideal()) continue;
        Rational direct = discrepancy(spec, p).norm();
        Rational via = an.discrepancy_of(std::span<const long>(x, 2));
        if (direct != via) {
          FAIL_CHECK(f << ": (" << a << ", " << b << ") direct " << direct.get_str() << " vs " << via.get_str());
        }
        ++checked;
      }
    CHECK(checked > kCases);
  }
}

TEST_CASE("Moebius inversion: pointwise identity and the T = 2 cross-check") {
  Gen g(105);
  auto mu = moebius_table(400);
  for (int i = 0; i < kCases; ++i) {
    WeightVector w({static_cast<int>(g.integer(1, 4)), static_cast<int>(g.integer(1, 4))});
    long k = g.integer(1, 6);
    long kw[2] = {1, 1};
    for (int j = 0; j < 2; ++j)
      for (int t = 0; t < w[j]; ++t) kw[j] *= k;
    long a = g.integer(-30, 30) * kw[0], b = g.integer(-30, 30) * kw[1];  // n <= 180 < cut
    if (a == 0 && b == 0) continue;
    std::vector<mpq_class> x = {mpq_class(a), mpq_class(b)};
    mpz_class n = oracle::scaling_ideal(x, w.values()).get_num();
    long sum = 0;
    for (long c = 1; c <= 400; ++c) {
      if (mu[c] == 0) continue;
      long cw0 = 1, cw1 = 1;
      bool overflow = false;
      for (int t = 0; t < w[0]; ++t) overflow = overflow || (cw0 *= c) > 1'000'000'000L;
      for (int t = 0; t < w[1]; ++t) overflow = overflow || (cw1 *= c) > 1'000'000'000L;
      bool in_lattice = (a == 0 || (!overflow && a % cw0 == 0)) && (b == 0 || (!overflow && b % cw1 == 0));
      if (in_lattice) sum += mu[c];
    }
    CHECK(sum == (n == 1 ? 1 : 0));
  }
  for (const auto& spec : specs()) {
    auto an = global_analysis(spec);
    auto rep = moebius_crosscheck(spec, an, 2, 50);
    CHECK(rep.pass);
    CHECK(rep.lhs_mass == count_exact(spec, an, 2).mass);
  }
}

TEST_CASE("counts partition by discrepancy") {
  Gen g(106);
  auto all = specs();
  std::vector<GlobalAnalysis> analyses;
  for (const auto& s : all) analyses.push_back(global_analysis(s));
  for (int i = 0; i < kCases; ++i) {
    std::size_t k = i % all.size();
    Rational T(g.integer(1, 300), 100);
    T.canonicalize();
    auto res = count_exact(all[k], analyses[k], T);
    Rational sum = 0;
    for (const auto& [d, m] : res.by_discrepancy) sum += m;
    CHECK(sum == res.mass);
    CHECK((res.mass.get_den() == 1 || res.mass.get_den() == 2));
  }
}

TEST_CASE("region scaling law at T = 2 and T = 5") {
  Gen g(107);
  auto all = specs();
  for (int i = 0; i < kCases; ++i) {
    const auto& spec = all[i % all.size()];
    if (spec.e != 1) continue;
    Rational z[2] = {g.rational(40, 16), g.rational(40, 16)};
    auto inside = [&](const Rational* p, const Rational& T) {
      for (std::size_t j = 0; j < spec.polys.size(); ++j) {
        Rational v = spec.polys[j](std::span<const Rational>(p, 2)), bound = 1;
        for (int t = 0; t < spec.target[j]; ++t) bound *= T;
        if (abs(v) > bound) return false;
      }
      return true;
    };
    for (int T : {2, 5}) {
      Rational s[2];
      for (int c = 0; c < 2; ++c) {
        s[c] = z[c];
        for (int t = 0; t < spec.source[c]; ++t) s[c] *= T;
      }
      CHECK(inside(z, 1) == inside(s, T));
    }
  }
}
