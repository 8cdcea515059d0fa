#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wpc/arith.hpp"
#include "wpc/morphism.hpp"

namespace wpc {

/// Certified box for the region {|f_j(z)| <= T^{u_j}}: ratio_safe is a proven lower
/// bound of max_j |f_j|^{1/u_j} on the weighted unit sphere, so every point of
/// the region has |z_i| <= (T / ratio_safe)^{w_i/e}.
struct BoundingBox {
  double ratio_min = 0;   ///< grid minimum of the ratio
  double ratio_safe = 0;  ///< certified lower bound actually used
  int attempts = 0;
  std::vector<double> half_widths;  ///< at T = 1

  std::vector<double> at(const MorphismSpec& spec, double T) const;
};

BoundingBox bounding_box(const MorphismSpec& spec);

/// Tighter certified enclosure [lo_i, hi_i]: every grid cell of the bounding box
/// outside it is proven empty by interval evaluation.
struct Hull {
  std::vector<double> lo;
  std::vector<double> hi;
  double volume() const;
};

Hull certified_hull(const MorphismSpec& spec, double T = 1.0);

using Segment = std::pair<long double, long double>;

/// {b in [clip_lo, clip_hi] : |f_j(a, b)| <= H_j for all j} as disjoint ascending intervals.
std::vector<Segment> admissible_slice(const MorphismSpec& spec, long double a, std::span<const long double> H,
                                      long double clip_lo, long double clip_hi);

/// Abscissae in (lo, hi) where the slice structure can change: real roots of
/// Res_b(f_j ∓ H_j, f_k ∓ H_k), of the b-discriminants, and of the b-leading coefficients.
std::vector<long double> corner_abscissae(const MorphismSpec& spec, const Rational& T, long double lo, long double hi);

struct Panel {
  long double lo = 0;
  long double hi = 0;
  long double value = 0;
};

struct VolumeEstimate {
  long double value = 0;
  long double error = 0;  ///< |I(2n) - I(n)| for slices, standard error for Monte Carlo
  std::string method;
  int grid = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double box_volume = 0;
  std::vector<long double> corners;
  std::vector<Panel> panels;
};

constexpr int kDefaultGrid = 2048;

/// Slice integration over the first coordinate with Gauss–Legendre on panels
/// between corner abscissae. Value uses 2·grid nodes, the error compares with grid.
VolumeEstimate volume_slice(const MorphismSpec& spec, int grid = kDefaultGrid, const Rational& T = 1, int threads = 1);

VolumeEstimate volume_monte_carlo(const MorphismSpec& spec, std::uint64_t samples, std::uint64_t seed,
                                  double T = 1.0, int threads = 1);

/// Writes "a,b" rows for the grid points of the hull that lie in the region.
void dump_region_grid(const MorphismSpec& spec, const std::string& path, int resolution, double T = 1.0);

/// Gauss–Legendre nodes and weights on [0, 1].
const std::pair<std::vector<long double>, std::vector<long double>>& gauss_legendre(int n);

}  // namespace wpc
