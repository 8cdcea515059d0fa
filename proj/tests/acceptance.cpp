#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "volume_oracles.hpp"
#include "wpc/asymptotics.hpp"
#include "wpc/enumeration.hpp"
#include "wpc/local_analysis.hpp"
#include "wpc/report.hpp"
#include "wpc/volume.hpp"

using namespace wpc;

namespace {

const std::string kFixtures = FIXTURE_DIR;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Collects failed conditions of one criterion.
struct Check {
  std::ostringstream detail;
  std::ostringstream failures;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures << " [" << what << "]";
    }
  }
};

int failed = 0;

void report(int n, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.failures << " [exception: " << e.what() << "]";
  }
  if (!c.ok) ++failed;
  std::printf("criterion %d: %s %s%s\n", n, c.ok ? "PASS" : "FAIL", c.detail.str().c_str(), c.failures.str().c_str());
  std::fflush(stdout);
}

bool near_any(const std::vector<long double>& xs, long double v, long double tol) {
  for (auto x : xs)
    if (std::fabs(x - v) < tol) return true;
  return false;
}

long double fitted(const MorphismSpec& spec, const GlobalAnalysis& an, const Rational& T) {
  CountOptions opts;
  opts.budget = 1'000'000'000;
  Rational m = count_exact(spec, an, T, opts).mass;
  return to_long_double(m) / std::pow(to_long_double(T), static_cast<long double>(spec.source.total()) / spec.e);
}

}  // namespace

int main() {
  report(1, [](Check& c) {
    auto spec = load_morphism(kFixtures + "/x1_2.json");
    auto t0 = std::chrono::steady_clock::now();
    auto an = global_analysis(spec);
    double secs = seconds_since(t0);
    c.expect(an.discrepancy_set == std::vector<Rational>{1, 2}, "D = {1, 2}");
    c.expect(an.bad_primes == std::vector<std::uint64_t>{2}, "S = {2}");
    c.expect(an.profiles.count(2) && an.profiles.at(2).modulus_exponents == std::vector<int>{3, 4}, "s = (3, 4)");
    c.expect(an.census_at(1, 1) == 125 && an.census_at(1, 2) == 0 && an.census_at(2, 1) == 3 &&
                 an.census_at(2, 2) == 2,
             "census (125, 0, 3, 2)");
    c.expect(an.modulus_index.at(1) == 128 && an.modulus_index.at(2) == 128, "index 128");
    c.expect(an.c_phi == Rational(3, 2), "C_phi = 3/2");
    c.expect(secs < 1.0, "runtime < 1 s");
    c.detail << "X1(2): D={1,2} S={2} s=(3,4) census=(125,0,3,2) index=128 C_phi=" << to_string(an.c_phi)
             << " in " << secs << " s";
  });

  report(2, [](Check& c) {
    auto spec = load_morphism(kFixtures + "/x1_3.json");
    auto t0 = std::chrono::steady_clock::now();
    auto an = global_analysis(spec);
    double secs = seconds_since(t0);
    c.expect(an.discrepancy_set == std::vector<Rational>{1}, "D = {1}");
    c.expect(an.bad_primes.empty(), "S empty");
    c.expect(an.c_phi == 1, "C_phi = 1");
    c.expect(secs < 1.0, "runtime < 1 s");
    c.detail << "X1(3): D={1} S={} C_phi=" << to_string(an.c_phi) << " in " << secs << " s";
  });

  report(3, [](Check& c) {
    struct Case {
      const char* file;
      long double reference;
    };
    for (Case k : {Case{"x1_2.json", 2.53774L}, Case{"x1_3.json", 1.8217L}}) {
      auto spec = load_morphism(kFixtures + "/" + k.file);
      auto t0 = std::chrono::steady_clock::now();
      auto s = volume_slice(spec);
      auto mc = volume_monte_carlo(spec, 10'000'000, 20240601);
      double secs = seconds_since(t0);
      c.expect(std::fabs(s.value - k.reference) <= 1e-3L, std::string(k.file) + " slice within 1e-3");
      c.expect(std::fabs(mc.value - s.value) <= 4 * mc.error, std::string(k.file) + " MC within 4 SE");
      c.expect(secs < 30, std::string(k.file) + " runtime < 30 s");
      c.detail << k.file << ": slice " << format12(s.value) << " MC " << format12(mc.value) << "±"
               << format12(mc.error) << " (" << secs << " s); ";
      if (std::string(k.file) == "x1_2.json") {
        long double alpha = oracle::alpha_x12();
        c.expect(std::fabs(alpha - 0.59607L) < 1e-5L, "alpha matches 0.59607");
        c.expect(near_any(s.corners, alpha, 1e-6L), "alpha among corners");
      } else {
        long double a0 = oracle::alpha0_x13(), a1 = oracle::alpha1_x13();
        c.expect(std::fabs(-a0 + 0.3044L) < 1e-4L && std::fabs(a1 - 1.3240L) < 1e-4L, "roots match -0.3044, 1.3240");
        // The slice corners sit at a = ±sqrt(α0), ±sqrt(α1).
        bool found0 = false, found1 = false;
        for (auto x : s.corners) {
          found0 = found0 || std::fabs(x * x - a0) < 1e-6L;
          found1 = found1 || std::fabs(x * x - a1) < 1e-6L;
        }
        c.expect(found0 && found1, "-alpha0 and alpha1 recovered from corners");
      }
    }
    c.detail << "boundary roots 0.59607, -0.3044, 1.3240 recovered to 1e-6";
  });

  report(4, [](Check& c) {
    auto x12 = load_morphism(kFixtures + "/x1_2.json");
    auto a12 = global_analysis(x12);
    auto v12 = volume_slice(x12);
    auto p12 = leading_constant(a12.c_phi, v12.value, x12);
    auto x13 = load_morphism(kFixtures + "/x1_3.json");
    auto a13 = global_analysis(x13);
    auto p13 = leading_constant(a13.c_phi, volume_slice(x13).value, x13);
    auto sig4 = [](long double v, long double ref) { return std::fabs(v - ref) / ref < 5e-5L; };
    c.expect(sig4(p12.leading_constant, 1.87086L), "X1(2) C = 1.87086 to 4 s.f.");
    c.expect(sig4(p13.leading_constant, 0.8416L), "X1(3) C = 0.8416 to 4 s.f.");
    // Audit: 945/(2π^6)·(3/2)·vol against 945/(2π^6)(2 + log 2 + α − log α), α from the slicer.
    long double alpha = 0;
    for (auto x : v12.corners)
      if (x > 0.5L && x < 0.7L) alpha = x;
    long double pi = std::acos(-1.0L);
    long double audit = 945 / (2 * std::pow(pi, 6)) * 1.5L * v12.value;
    long double closed = 945 / (2 * std::pow(pi, 6)) * (2 + std::log(2.0L) + alpha - std::log(alpha));
    c.expect(std::fabs(audit - closed) < 1e-6L, "exact-factor audit to 1e-6");
    c.expect(std::fabs(p12.leading_constant - closed) < 1e-6L, "pipeline equals closed form");
    c.detail << "C(X1(2)) = " << format12(p12.leading_constant) << ", C(X1(3)) = " << format12(p13.leading_constant)
             << ", audit |diff| = " << format12(std::fabs(audit - closed));
  });

  report(5, [](Check& c) {
    auto x12 = load_morphism(kFixtures + "/x1_2.json");
    auto x13 = load_morphism(kFixtures + "/x1_3.json");
    auto id = load_morphism(kFixtures + "/identity_p11.json");
    auto t0 = std::chrono::steady_clock::now();
    long double f12 = fitted(x12, global_analysis(x12), 30);
    long double f13 = fitted(x13, global_analysis(x13), 100);
    long double fid = fitted(id, global_analysis(id), 10000);
    double secs = seconds_since(t0);
    long double schanuel = 2 / oracle::zeta2();
    long double g12 = std::fabs(f12 - 1.87086L) / 1.87086L, g13 = std::fabs(f13 - 0.8416L) / 0.8416L;
    long double gid = std::fabs(fid - schanuel) / schanuel;
    c.expect(g12 <= 0.02L, "X1(2) T=30 within 2%");
    c.expect(g13 <= 0.05L, "X1(3) T=100 within 5%");
    c.expect(gid <= 0.01L, "identity T=1e4 within 1%");
    c.detail << "fitted X1(2)@30 = " << format12(f12) << " (gap " << format12(g12) << "), X1(3)@100 = "
             << format12(f13) << " (gap " << format12(g13) << "), P(1,1)@1e4 = " << format12(fid) << " (gap "
             << format12(gid) << ") in " << secs << " s";
  });

  report(6, [](Check& c) {
    int runs = 0;
    for (const auto& f : oracle::fixtures()) {
      auto spec = load_morphism(kFixtures + "/" + f.file);
      auto an = global_analysis(spec);
      for (const Rational& T : {Rational(1), Rational(3, 2), Rational(2), Rational(3)}) {
        auto naive = oracle::naive_count(f, T);
        auto res = count_exact(spec, an, T);
        c.expect(res.mass == naive.mass, f.file + " T=" + to_string(T));
        ++runs;
      }
    }
    auto x12 = load_morphism(kFixtures + "/x1_2.json");
    auto x13 = load_morphism(kFixtures + "/x1_3.json");
    Rational n12 = count_exact(x12, global_analysis(x12), 1).mass;
    Rational n13 = count_exact(x13, global_analysis(x13), 1).mass;
    // Pinned at the oracle's values. The stated N(1) = 2 for both is not reproduced: X1(2) also has
    // (±8, 24) at height exactly 1, and for X1(3) (1, 0) and (-1, 0) are one point of ℙ(1,3).
    c.expect(n12 == 3, "X1(2) N(1) = 3 (oracle value)");
    c.expect(n13 == 1, "X1(3) N(1) = 1 (oracle value)");
    c.detail << runs << " exact oracle comparisons; N(1) pinned at oracle values X1(2) = " << to_string(n12)
             << ", X1(3) = " << to_string(n13)
             << " (deviation: stated value 2 for both is not reproduced by the oracle)";
  });

  report(7, [](Check& c) {
    std::string cmd = std::string(WPC_TESTS_PATH) + " --source-file=*test_properties.cpp > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    c.expect(ok, "property suite exit status");
    c.detail << "8 property suites, 1000+ randomized cases each (scaling ideal, height, equivariance, discrepancy "
                "invariance, profile agreement on [-200,200]^2, Moebius at T=2, partition, region scaling)";
  });

  report(8, [](Check& c) {
    auto inf = parse_morphism(
        R"({"name":"sq","source_weights":[2,4],"target_weights":[2,4],"polynomials":["x1^2","x2^2"]})");
    bool rejected = false;
    try {
      global_analysis(inf);
    } catch (const InfiniteDiscrepancy& e) {
      rejected = std::string(e.what()).find("discrepancy set may be infinite") != std::string::npos;
    }
    c.expect(rejected, "e > 1 on P(2,4) rejected");
    std::string witness;
    int condition = 0;
    try {
      parse_morphism(R"({"name":"c","source_weights":[1,1],"target_weights":[1,1],"polynomials":["x1^2","x1*x2"]})");
    } catch (const InvalidMorphism& e) {
      condition = e.condition();
      witness = e.what();
    }
    c.expect(condition == 2 && !witness.empty(), "common zero rejected with witness");
    c.detail << "e=2 on P(2,4) -> InfiniteDiscrepancy; (x1^2, x1*x2) -> condition 2: " << witness;
  });

  return failed == 0 ? 0 : 1;
}
