#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "wpc/arith.hpp"
#include "wpc/morphism.hpp"

namespace wpc {

/// e > 1 with a weight above 1: the discrepancy set need not be finite.
class InfiniteDiscrepancy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level-wise refinement hit the cap without deciding every class.
class StabilizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kMaxLevel = 24;

/// Local discrepancy data at one prime.
///
/// labels[] holds, for each residue class mod (p^{s_1},...,p^{s_m}), the value
/// min(j_cap, min_i floor(ord_p f_i(x)/u_i)), which is constant on the class for
/// every x in it, primitive or not. On primitive points it equals δ_p(x).
struct LocalProfile {
  std::uint64_t p = 0;
  std::vector<int> modulus_exponents;
  std::set<long> realized;  ///< j values taken on primitive points
  std::vector<long> labels; ///< mixed radix, first coordinate fastest

  bool trivial_modulus() const;
  /// Constant profile equal to 0: p never divides a discrepancy.
  bool trivial() const { return trivial_modulus() && realized == std::set<long>{0}; }
  std::size_t class_count() const { return labels.size(); }
  std::vector<Integer> moduli() const;
  std::size_t class_index(std::span<const Integer> x) const;
  std::size_t class_index(std::span<const long> x) const;
  std::vector<long> class_residues(std::size_t index) const;
  long label(std::span<const Integer> x) const { return labels[class_index(x)]; }
  long label(std::span<const long> x) const { return labels[class_index(x)]; }
};

/// Primes that can divide some discrepancy ideal. Throws InfiniteDiscrepancy
/// when e > 1 and some w_i > 1.
std::vector<std::uint64_t> candidate_primes(const MorphismSpec& spec);

LocalProfile local_profile(const MorphismSpec& spec, std::uint64_t p, int max_level = kMaxLevel);

/// δ(x) = I_u(φ(x)) · I_w(x)^{-e}, straight from the definition.
FactoredRational discrepancy(const MorphismSpec& spec, const WeightedPoint& x);

struct GlobalAnalysis {
  std::vector<std::uint64_t> candidates;
  std::map<std::uint64_t, LocalProfile> profiles;  ///< nontrivial primes only
  std::vector<std::uint64_t> bad_primes;           ///< nontrivial modulus
  std::vector<Rational> discrepancy_set;           ///< ascending
  std::map<std::pair<Rational, Integer>, Integer> census;  ///< (d, c1)
  std::map<Integer, Integer> modulus_index;                 ///< c1
  Rational c_phi;

  Rational d_max() const { return discrepancy_set.back(); }
  /// Discrepancy of a primitive integer point through the profiles.
  Rational discrepancy_of(std::span<const Integer> x) const;
  Rational discrepancy_of(std::span<const long> x) const;
  Integer census_at(const Rational& d, const Integer& c1) const;
  /// Product of p^{s_i} over bad primes, per coordinate.
  std::vector<Integer> global_moduli() const;
};

GlobalAnalysis global_analysis(const MorphismSpec& spec, int threads = 1);

}  // namespace wpc
