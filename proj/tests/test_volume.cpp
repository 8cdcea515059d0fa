#include <doctest.h>

#include <cmath>
#include <random>

#include "volume_oracles.hpp"
#include "wpc/interval.hpp"
#include "wpc/univariate.hpp"
#include "wpc/volume.hpp"

using namespace wpc;

namespace {

const std::string kFixtures = FIXTURE_DIR;

bool near_any(const std::vector<long double>& xs, long double v, long double tol) {
  for (auto x : xs)
    if (std::fabs(x - v) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("closed-form oracles") {
  CHECK(std::fabs(oracle::alpha_x12() - 0.59607163798L) < 1e-10L);
  CHECK(std::fabs(oracle::volume_x12() - 2.537742159816L) < 1e-11L);
  CHECK(std::fabs(oracle::volume_x13() - 1.821789917822L) < 1e-9L);
}

TEST_CASE("interval arithmetic encloses") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 2000; ++i) {
    double a = u(rng), b = u(rng);
    Interval A(std::min(a, b), std::max(a, b));
    double t = A.lo + (A.hi - A.lo) * 0.37;
    Interval p = pow(A, 3) - A * Interval(2.0) + pow(A, 2);
    long double exact = static_cast<long double>(t) * t * t - 2.0L * t + static_cast<long double>(t) * t;
    CHECK(p.lo <= exact);
    CHECK(p.hi >= exact);
  }
}

TEST_CASE("Sturm root isolation") {
  // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
  QPoly p({6, -7, 0, 1});
  CHECK(count_real_roots(p, -100, 100) == 3);
  auto roots = certified_real_roots(p);
  REQUIRE(roots.size() == 3);
  CHECK(std::fabs(roots[0] + 3) < 1e-15L);
  CHECK(std::fabs(roots[1] - 1) < 1e-15L);
  CHECK(std::fabs(roots[2] - 2) < 1e-15L);
  QPoly q({-2, 3, 0, 1});  // x^3 + 3x - 2
  auto r = certified_real_roots(q);
  REQUIRE(r.size() == 1);
  CHECK(std::fabs(r[0] - oracle::alpha_x12()) < 1e-15L);
  QPoly sq = QPoly({-1, 1}) * QPoly({-1, 1}) * QPoly({1, 0, 1});
  CHECK(isolate_real_roots(squarefree_part(sq)).size() == 1);
}

TEST_CASE("bounding boxes") {
  auto id = load_morphism(kFixtures + "/identity_p11.json");
  auto box = bounding_box(id);
  CHECK(box.half_widths[0] >= 1);
  CHECK(box.half_widths[1] >= 1);
  CHECK(box.half_widths[0] <= 2);
  CHECK(box.half_widths[1] <= 2);
  auto x12 = load_morphism(kFixtures + "/x1_2.json");
  CHECK(bounding_box(x12).half_widths[0] >= 2);
  auto h12 = certified_hull(x12);
  CHECK(h12.lo[0] <= -2);
  CHECK(h12.hi[0] >= 2);
  auto x13 = load_morphism(kFixtures + "/x1_3.json");
  auto h13 = certified_hull(x13);
  CHECK(h13.lo[0] <= -std::sqrt(3.0));
  CHECK(h13.hi[0] >= std::sqrt(3.0));
  CHECK(bounding_box(x13).half_widths[0] >= std::sqrt(3.0));
}

TEST_CASE("slice volumes") {
  auto id = load_morphism(kFixtures + "/identity_p11.json");
  CHECK(std::fabs(volume_slice(id).value - 4) < 1e-9L);
  auto x12 = load_morphism(kFixtures + "/x1_2.json");
  auto v12 = volume_slice(x12);
  CHECK(std::fabs(v12.value - oracle::volume_x12()) < 1e-9L);
  CHECK(v12.error < 1e-6L);
  CHECK(near_any(v12.corners, oracle::alpha_x12(), 1e-9L));
  CHECK(near_any(v12.corners, -oracle::alpha_x12(), 1e-9L));
  auto x13 = load_morphism(kFixtures + "/x1_3.json");
  auto v13 = volume_slice(x13);
  CHECK(std::fabs(v13.value - oracle::volume_x13()) < 1e-8L);
  CHECK(near_any(v13.corners, std::sqrt(oracle::alpha0_x13()), 1e-9L));
  CHECK(near_any(v13.corners, std::sqrt(oracle::alpha1_x13()), 1e-9L));
}

TEST_CASE("Monte Carlo volumes") {
  auto id = load_morphism(kFixtures + "/identity_p11.json");
  auto m = volume_monte_carlo(id, 1'000'000, 7);
  CHECK(std::fabs(m.value - 4) < 0.02L);
  auto x12 = load_morphism(kFixtures + "/x1_2.json");
  auto a = volume_monte_carlo(x12, 1'000'000, 42), b = volume_monte_carlo(x12, 1'000'000, 42, 1.0, 2);
  CHECK(a.value == b.value);
  CHECK(std::fabs(a.value - oracle::volume_x12()) < 4 * a.error);
}

TEST_CASE("region scaling law") {
  for (auto f : {"/x1_2.json", "/x1_3.json", "/identity_p24.json"}) {
    auto spec = load_morphism(kFixtures + f);
    long double v1 = volume_slice(spec).value;
    for (int T : {2, 5}) {
      long double vT = volume_slice(spec, kDefaultGrid, T).value;
      long double expect = v1 * std::pow(static_cast<long double>(T), static_cast<long double>(spec.source.total()) / spec.e);
      CHECK(std::fabs(vT / expect - 1) < 1e-9L);
    }
  }
}
