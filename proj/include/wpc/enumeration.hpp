#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpc/asymptotics.hpp"
#include "wpc/local_analysis.hpp"
#include "wpc/morphism.hpp"

namespace wpc {

/// The x1 scan would exceed the configured cell budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CountOptions {
  int threads = 1;
  std::uint64_t budget = 100'000'000;  ///< x1 values times |𝒟|
  std::string checkpoint;              ///< resumable slab log; empty disables it
  std::int64_t slab_size = 2048;
  bool exclude_singular = false;       ///< X1(2) only: drop b = 0 and 8b = 3a^2
};

struct CountResult {
  Rational mass;
  std::map<Rational, Rational> by_discrepancy;
  std::uint64_t vectors = 0;  ///< primitive integer vectors; each point has mass vectors/2
  std::int64_t x1_bound = 0;
  std::size_t slabs = 0;
  std::size_t slabs_resumed = 0;
};

/// Mass of {x in ℙ(w)(ℚ) : S_u(φ(x)) <= T}, i.e. half the number of primitive
/// integer vectors x with S_{u,∞}(φ(x)) <= d(x)·T.
CountResult count_exact(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                        const CountOptions& opts = {});

std::map<Rational, Rational> count_by_discrepancy(const MorphismSpec& spec, const GlobalAnalysis& analysis,
                                                  const Rational& T, const CountOptions& opts = {});

struct PointRecord {
  std::int64_t a;
  std::int64_t b;
  Rational d;
  Rational mass;  ///< 1 / #Aut
};

/// Visits canonical representatives of the counted points, in x1 order.
void enumerate_points(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                      const std::function<void(const PointRecord&)>& visit, const CountOptions& opts = {});

struct MoebiusReport {
  bool pass = false;
  bool tail_certified = false;
  std::uint64_t largest_scaling_ideal = 0;
  std::map<Rational, std::pair<Integer, Integer>> by_discrepancy;  ///< d -> (lhs, rhs), vector counts
  std::map<std::uint64_t, Integer> lattice_counts;                 ///< c -> #(V ∩ c^w) summed over d
  Rational lhs_mass;
  std::string witness;
};

/// Checks #{x in V^d primitive} = Σ_{c <= cut} μ(c) #{x in V^d ∩ c^w} for every d, with
/// S_{u,∞}(φ(x)) <= dT on both sides, by direct enumeration.
MoebiusReport moebius_crosscheck(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                                 std::uint64_t prime_cut);

struct CountReport {
  std::vector<Rational> ladder;
  std::vector<Rational> masses;
  std::vector<long double> fitted;
  std::vector<long double> relative_gaps;
  AsymptoticPrediction prediction;
  long double expected_rate = 0;  ///< min_i w_i / e, gaps should fall like T^{-rate}
  bool shrinking = true;
};

CountReport convergence_report(const MorphismSpec& spec, const GlobalAnalysis& analysis,
                               const AsymptoticPrediction& prediction, const std::vector<Rational>& ladder,
                               const CountOptions& opts = {});

}  // namespace wpc
