#pragma once

#include "wpc/arith.hpp"
#include "wpc/local_analysis.hpp"
#include "wpc/morphism.hpp"

namespace wpc {

struct AsymptoticPrediction {
  Rational c_phi;
  long double volume = 0;
  long double leading_constant = 0;
  Rational exponent;        ///< |w|/e
  Rational error_exponent;  ///< |w|/e - min_i w_i/(e N)
  bool special_log = false;
};

/// Σ_d Σ_{c1} d^{|w|/e} μ(c1) census(d,c1)/index(c1) · Π_{p bad} (1 - p^{-|w|})^{-1}, exact.
Rational c_phi(const GlobalAnalysis& analysis, const MorphismSpec& spec);

AsymptoticPrediction leading_constant(const Rational& c_phi, long double volume, const MorphismSpec& spec);

}  // namespace wpc
