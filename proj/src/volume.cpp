#include "wpc/volume.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "wpc/interval.hpp"
#include "wpc/univariate.hpp"

namespace wpc {

namespace {

void require_plane(const MorphismSpec& spec) {
  if (spec.dim() != 2) throw std::invalid_argument("volume computations implemented for m=2 only");
}

double sphere_ratio(const MorphismSpec& spec, long double z1, long double z2) {
  long double z[2] = {z1, z2};
  double r = 0;
  for (std::size_t j = 0; j < spec.polys.size(); ++j) {
    long double v = std::fabs(spec.polys[j].evaluate(z));
    r = std::max(r, static_cast<double>(std::pow(v, 1.0L / spec.target[j])));
  }
  return r;
}

/// Proves max_j |f_j|^{1/u_j} >= c on the face where coordinate `fixed` is ±1.
bool certify_face(const MorphismSpec& spec, std::size_t fixed, double sign, double c) {
  std::vector<std::pair<double, double>> stack;
  const int pieces = 256;
  for (int k = 0; k < pieces; ++k) stack.emplace_back(-1.0 + 2.0 * k / pieces, -1.0 + 2.0 * (k + 1) / pieces);
  int budget = 1 << 20;
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    Interval z[2];
    z[fixed] = Interval(sign);
    z[1 - fixed] = Interval(lo, hi);
    double best = 0;
    for (std::size_t j = 0; j < spec.polys.size(); ++j) {
      double L = evaluate(spec.polys[j], z).mag_lower();
      best = std::max(best, std::pow(L, 1.0 / spec.target[j]) * (1 - 1e-12));
    }
    if (best >= c) continue;
    if (--budget < 0 || hi - lo < 1e-12) return false;
    double mid = 0.5 * (lo + hi);
    stack.emplace_back(lo, mid);
    stack.emplace_back(mid, hi);
  }
  return true;
}

}  // namespace

std::vector<double> BoundingBox::at(const MorphismSpec& spec, double T) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < spec.dim(); ++i)
    out.push_back(std::pow(T / ratio_safe, static_cast<double>(spec.source[i]) / spec.e));
  return out;
}

namespace {

BoundingBox compute_bounding_box(const MorphismSpec& spec) {
  BoundingBox box;
  const int n = 4096;
  double c = INFINITY;
  for (std::size_t fixed = 0; fixed < 2; ++fixed)
    for (double sign : {-1.0, 1.0})
      for (int k = 0; k <= n; ++k) {
        long double t = -1.0L + 2.0L * k / n;
        long double z1 = fixed == 0 ? sign : t, z2 = fixed == 0 ? t : sign;
        c = std::min(c, sphere_ratio(spec, z1, z2));
      }
  if (!(c > 0)) throw std::runtime_error("bounding_box: the polynomials vanish together on the unit sphere");
  box.ratio_min = c;
  double safe = c / 2;
  for (int attempt = 1; attempt <= 5; ++attempt) {
    bool ok = true;
    for (std::size_t fixed = 0; fixed < 2 && ok; ++fixed)
      for (double sign : {-1.0, 1.0}) ok = ok && certify_face(spec, fixed, sign, safe);
    if (ok) {
      box.ratio_safe = safe;
      box.attempts = attempt;
      box.half_widths = box.at(spec, 1.0);
      return box;
    }
    safe /= 2;
  }
  throw std::runtime_error("bounding_box: interval certification failed after 4 enlargements");
}

}  // namespace

BoundingBox bounding_box(const MorphismSpec& spec) {
  require_plane(spec);
  std::string key;
  for (std::size_t i = 0; i < spec.dim(); ++i)
    key += std::to_string(spec.source[i]) + "," + std::to_string(spec.target[i]) + ":" + spec.polys[i].to_string() + ";";
  static std::mutex mu;
  static std::map<std::string, BoundingBox> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  BoundingBox box = compute_bounding_box(spec);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, box);
  return box;
}

double Hull::volume() const {
  double v = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

Hull certified_hull(const MorphismSpec& spec, double T) {
  require_plane(spec);
  auto B = bounding_box(spec).at(spec, T);
  Hull h{{-B[0], -B[1]}, {B[0], B[1]}};
  std::vector<Interval> H;
  for (std::size_t j = 0; j < spec.polys.size(); ++j) H.push_back(pow(Interval(T), spec.target[j]));
  const int N = 256;
  for (int pass = 0; pass < 3; ++pass) {
    double da = (h.hi[0] - h.lo[0]) / N, db = (h.hi[1] - h.lo[1]) / N;
    double alo = INFINITY, ahi = -INFINITY, blo = INFINITY, bhi = -INFINITY;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        double a0 = h.lo[0] + i * da, a1 = i + 1 == N ? h.hi[0] : h.lo[0] + (i + 1) * da;
        double b0 = h.lo[1] + k * db, b1 = k + 1 == N ? h.hi[1] : h.lo[1] + (k + 1) * db;
        Interval z[2] = {Interval(a0, a1), Interval(b0, b1)};
        bool empty = false;
        for (std::size_t j = 0; j < spec.polys.size() && !empty; ++j) {
          Interval v = evaluate(spec.polys[j], z);
          empty = v.lo > H[j].hi || v.hi < -H[j].hi;
        }
        if (empty) continue;
        alo = std::min(alo, a0);
        ahi = std::max(ahi, a1);
        blo = std::min(blo, b0);
        bhi = std::max(bhi, b1);
      }
    if (!(alo < ahi)) break;
    h = Hull{{alo, blo}, {ahi, bhi}};
  }
  return h;
}

std::vector<Segment> admissible_slice(const MorphismSpec& spec, long double a, std::span<const long double> H,
                                      long double clip_lo, long double clip_hi) {
  std::vector<Segment> acc{{clip_lo, clip_hi}};
  for (std::size_t j = 0; j < spec.polys.size() && !acc.empty(); ++j) {
    std::vector<long double> coeffs;
    for (const auto& [k, c] : spec.polys[j].terms()) {
      std::size_t kb = static_cast<std::size_t>(k[1]);
      if (coeffs.size() <= kb) coeffs.resize(kb + 1, 0.0L);
      coeffs[kb] += to_long_double(c) * std::pow(a, static_cast<long double>(k[0]));
    }
    RealPoly P(coeffs);
    std::vector<Segment> mine;
    if (P.degree() <= 0) {
      long double c0 = P.degree() < 0 ? 0.0L : P.coeffs()[0];
      if (std::fabs(c0) <= H[j]) mine.push_back({clip_lo, clip_hi});
    } else {
      std::vector<long double> cut{clip_lo, clip_hi};
      for (long double s : {-1.0L, 1.0L}) {
        std::vector<long double> c = coeffs;
        c[0] -= s * H[j];
        for (long double r : real_roots(RealPoly(c)))
          if (r > clip_lo && r < clip_hi) cut.push_back(r);
      }
      std::sort(cut.begin(), cut.end());
      for (std::size_t i = 0; i + 1 < cut.size(); ++i) {
        if (!(cut[i] < cut[i + 1])) continue;
        long double mid = cut[i] + (cut[i + 1] - cut[i]) / 2;
        if (std::fabs(P(mid)) <= H[j]) {
          if (!mine.empty() && mine.back().second == cut[i])
            mine.back().second = cut[i + 1];
          else
            mine.push_back({cut[i], cut[i + 1]});
        }
      }
    }
    std::vector<Segment> next;
    for (const auto& x : acc)
      for (const auto& y : mine) {
        long double lo = std::max(x.first, y.first), hi = std::min(x.second, y.second);
        if (lo < hi) next.push_back({lo, hi});
      }
    acc = std::move(next);
  }
  return acc;
}

std::vector<long double> corner_abscissae(const MorphismSpec& spec, const Rational& T, long double lo, long double hi) {
  require_plane(spec);
  std::vector<QPoly> critical;
  std::vector<std::vector<QBiPoly>> shifted(spec.polys.size());
  for (std::size_t j = 0; j < spec.polys.size(); ++j) {
    QBiPoly f = spec.polys[j].as_bivariate();
    Rational H = 1;
    for (int k = 0; k < spec.target[j]; ++k) H *= T;
    for (int s : {-1, 1}) {
      QBiPoly g = f - QBiPoly::constant(QPoly::constant(Rational(s) * H));
      shifted[j].push_back(g);
      if (g.degree() == 0) {
        critical.push_back(g.coeffs()[0]);
      } else if (g.degree() > 0) {
        critical.push_back(g.leading());
        critical.push_back(resultant(g, derivative_outer(g)));
      }
    }
  }
  for (std::size_t j = 0; j < shifted.size(); ++j)
    for (std::size_t k = j + 1; k < shifted.size(); ++k)
      for (const auto& g : shifted[j])
        for (const auto& h : shifted[k])
          if (g.degree() > 0 && h.degree() > 0) critical.push_back(resultant(g, h));
  std::vector<long double> out;
  for (const auto& q : critical) {
    if (q.degree() <= 0) continue;
    for (long double r : certified_real_roots(q))
      if (r > lo && r < hi) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  std::vector<long double> uniq;
  for (long double r : out)
    if (uniq.empty() || r - uniq.back() > 1e-15L * std::max(1.0L, std::fabs(r))) uniq.push_back(r);
  return uniq;
}

const std::pair<std::vector<long double>, std::vector<long double>>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<long double>, std::vector<long double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<long double> x(n), w(n);
  const long double pi = 3.141592653589793238462643383279502884L;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L)), pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p1 = 1, p2 = 0;
      for (int k = 1; k <= n; ++k) {
        long double p3 = p2;
        p2 = p1;
        p1 = ((2 * k - 1) * z * p2 - (k - 1) * p3) / k;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    // Map [-1, 1] to [0, 1].
    long double wt = 1.0L / ((1 - z * z) * pp * pp);
    x[i] = (1 - z) / 2;
    x[n - 1 - i] = (1 + z) / 2;
    w[i] = w[n - 1 - i] = wt;
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

struct Node {
  long double a;
  long double weight;
  std::size_t panel;
};

std::vector<Node> panel_nodes(const std::vector<long double>& breaks, int n) {
  long double width = breaks.back() - breaks.front();
  std::vector<Node> nodes;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    long double lo = breaks[k], hi = breaks[k + 1], h = hi - lo;
    int nk = std::max(16, static_cast<int>(std::lround(n * (h / width))));
    const auto& [x, w] = gauss_legendre(nk);
    for (int i = 0; i < nk; ++i) {
      // Smoothstep substitution flattens square-root behaviour at panel ends.
      long double t = x[i];
      long double s = t * t * (3 - 2 * t), ds = 6 * t * (1 - t);
      nodes.push_back({lo + h * s, w[i] * h * ds, k});
    }
  }
  return nodes;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = 64;
  auto worker = [&] {
    for (std::size_t start; (start = next.fetch_add(chunk)) < n;)
      for (std::size_t i = start; i < std::min(n, start + chunk); ++i) body(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

VolumeEstimate volume_slice(const MorphismSpec& spec, int grid, const Rational& T, int threads) {
  require_plane(spec);
  if (grid < 2) throw std::invalid_argument("volume_slice: grid must be at least 2");
  double Td = T.get_d();
  Hull hull = certified_hull(spec, Td);
  std::vector<long double> H;
  for (std::size_t j = 0; j < spec.polys.size(); ++j) {
    Rational h = 1;
    for (int k = 0; k < spec.target[j]; ++k) h *= T;
    H.push_back(to_long_double(h));
  }
  VolumeEstimate est;
  est.method = "slice";
  est.grid = grid;
  est.box_volume = hull.volume();
  est.corners = corner_abscissae(spec, T, hull.lo[0], hull.hi[0]);
  std::vector<long double> breaks{hull.lo[0]};
  breaks.insert(breaks.end(), est.corners.begin(), est.corners.end());
  breaks.push_back(hull.hi[0]);

  auto integrate = [&](int n, std::vector<Panel>& panels) {
    auto nodes = panel_nodes(breaks, n);
    std::vector<long double> vals(nodes.size());
    parallel_for(nodes.size(), threads, [&](std::size_t i) {
      long double len = 0;
      for (auto [lo, hi] : admissible_slice(spec, nodes[i].a, H, hull.lo[1], hull.hi[1])) len += hi - lo;
      vals[i] = len * nodes[i].weight;
    });
    panels.assign(breaks.size() - 1, Panel{});
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) panels[k] = Panel{breaks[k], breaks[k + 1], 0};
    long double total = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      panels[nodes[i].panel].value += vals[i];
      total += vals[i];
    }
    return total;
  };
  std::vector<Panel> coarse;
  long double lowres = integrate(grid, coarse);
  est.value = integrate(2 * grid, est.panels);
  est.error = std::fabs(est.value - lowres);
  return est;
}

namespace {

struct FastPoly {
  std::vector<std::pair<double, std::pair<int, int>>> terms;
  double eval(double a, double b) const {
    double acc = 0;
    for (const auto& [c, k] : terms) {
      double t = c;
      for (int i = 0; i < k.first; ++i) t *= a;
      for (int i = 0; i < k.second; ++i) t *= b;
      acc += t;
    }
    return acc;
  }
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

VolumeEstimate volume_monte_carlo(const MorphismSpec& spec, std::uint64_t samples, std::uint64_t seed, double T,
                                  int threads) {
  require_plane(spec);
  if (samples == 0) throw std::invalid_argument("volume_monte_carlo: samples must be positive");
  Hull hull = certified_hull(spec, T);
  std::vector<FastPoly> polys;
  std::vector<double> H;
  for (std::size_t j = 0; j < spec.polys.size(); ++j) {
    FastPoly f;
    for (const auto& [k, c] : spec.polys[j].terms()) f.terms.push_back({c.get_d(), {k[0], k[1]}});
    polys.push_back(f);
    H.push_back(std::pow(T, spec.target[j]));
  }
  const std::uint64_t batch = 1 << 20;
  std::uint64_t nbatches = (samples + batch - 1) / batch;
  std::vector<std::uint64_t> hits(nbatches, 0);
  parallel_for(nbatches, threads, [&](std::size_t k) {
    std::mt19937_64 rng(splitmix(seed ^ splitmix(k)));
    std::uint64_t n = std::min(batch, samples - k * batch), h = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      double ua = (rng() >> 11) * 0x1.0p-53, ub = (rng() >> 11) * 0x1.0p-53;
      double a = hull.lo[0] + (hull.hi[0] - hull.lo[0]) * ua;
      double b = hull.lo[1] + (hull.hi[1] - hull.lo[1]) * ub;
      bool in = true;
      for (std::size_t j = 0; j < polys.size() && in; ++j) in = std::fabs(polys[j].eval(a, b)) <= H[j];
      h += in;
    }
    hits[k] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  VolumeEstimate est;
  est.method = "monte_carlo";
  est.samples = samples;
  est.seed = seed;
  est.box_volume = hull.volume();
  double frac = static_cast<double>(total) / samples;
  est.value = est.box_volume * frac;
  est.error = est.box_volume * std::sqrt(frac * (1 - frac) / samples);
  return est;
}

void dump_region_grid(const MorphismSpec& spec, const std::string& path, int resolution, double T) {
  Hull hull = certified_hull(spec, T);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "a,b\n";
  char buf[64];
  for (int i = 0; i <= resolution; ++i)
    for (int k = 0; k <= resolution; ++k) {
      long double z[2] = {hull.lo[0] + (hull.hi[0] - hull.lo[0]) * i / resolution,
                          hull.lo[1] + (hull.hi[1] - hull.lo[1]) * k / resolution};
      bool in = true;
      for (std::size_t j = 0; j < spec.polys.size() && in; ++j)
        in = std::fabs(spec.polys[j].evaluate(z)) <= std::pow(static_cast<long double>(T), spec.target[j]);
      if (in) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", static_cast<double>(z[0]), static_cast<double>(z[1]));
        out << buf;
      }
    }
}

}  // namespace wpc
