#include "wpc/enumeration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "wpc/volume.hpp"

namespace wpc {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

/// Integer ranges [lo, hi] of admissible x2 values for one x1 and one discrepancy.
using Range = std::pair<i64, i64>;

i64 floor_div128(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return static_cast<i64>(q);
}

i128 gcd128(i128 a, i128 b) {
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

/// #{b in [lo, hi] : b ≡ r mod m, b ≡ 0 mod k}.
i64 count_congruent(i64 lo, i64 hi, i128 r, i128 m, i128 k) {
  if (lo > hi) return 0;
  if (k > (i128(1) << 62)) return (lo <= 0 && hi >= 0 && r % m == 0) ? 1 : 0;
  i128 g = gcd128(m, k);
  if (r % g != 0) return 0;
  i128 mg = m / g, kg = k / g;
  // Solve k t ≡ r (mod m): t ≡ (r/g) kg^{-1} (mod mg).
  i128 t = 0;
  if (mg > 1) {
    i128 old_r = kg % mg, cur_r = mg, old_s = 1, cur_s = 0;
    while (cur_r != 0) {
      i128 q = old_r / cur_r;
      std::swap(old_r, cur_r);
      cur_r -= q * old_r;
      std::swap(old_s, cur_s);
      cur_s -= q * old_s;
    }
    i128 inv = ((old_s % mg) + mg) % mg;
    t = ((r / g) % mg) * inv % mg;
  }
  i128 L = mg * k;
  i128 x0 = (k * t) % L;
  return floor_div128(i128(hi) - x0, L) - floor_div128(i128(lo) - 1 - x0, L);
}

i64 ipow_clamped(i64 base, int k) {
  i128 r = 1;
  for (int i = 0; i < k; ++i) {
    r *= base;
    if (r > (i128(1) << 62)) return i64(1) << 62;
  }
  return static_cast<i64>(r);
}

/// floor(n^{1/k}) for n >= 0.
i64 integer_root(i64 n, int k) {
  if (n <= 0) return 0;
  i64 r = static_cast<i64>(std::pow(static_cast<long double>(n), 1.0L / k));
  while (r > 0 && ipow_clamped(r, k) > n) --r;
  while (ipow_clamped(r + 1, k) <= n) ++r;
  return r;
}

bool is_x1_2(const MorphismSpec& spec) {
  if (!(spec.source == WeightVector{2, 4}) || !(spec.target == WeightVector{4, 6})) return false;
  return spec.polys[0].terms() == parse_polynomial("x1^2 - 2*x2", spec.source).terms() &&
         spec.polys[1].terms() == parse_polynomial("3*x1*x2 - x1^3", spec.source).terms();
}

std::string spec_fingerprint(const MorphismSpec& spec) {
  std::string s = spec.name + "|";
  for (int w : spec.source.values()) s += std::to_string(w) + ",";
  s += "|";
  for (int u : spec.target.values()) s += std::to_string(u) + ",";
  for (const auto& f : spec.polys) s += "|" + f.to_string();
  return s;
}

/// Shared read-only state of one counting run.
class Scanner {
 public:
  Scanner(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T)
      : spec_(spec), analysis_(analysis), T_(T) {
    if (spec.dim() != 2) throw std::invalid_argument("exact counting is implemented for m = 2");
    if (sgn(T) <= 0) throw std::invalid_argument("T must be positive");
    w1_ = spec.source[0];
    w2_ = spec.source[1];
    D_ = analysis.discrepancy_set;
    for (const auto& f : spec.polys) denominators_.push_back(f.denominator());
    for (const Rational& d : D_) {
      std::vector<Rational> hq;
      std::vector<long double> hl;
      for (std::size_t j = 0; j < spec.polys.size(); ++j) {
        Rational h = 1;
        Rational dt = d * T;
        for (int k = 0; k < spec.target[j]; ++k) h *= dt;
        hq.push_back(h);
        // Slightly inflated so that tangential boundary points survive the floating slicer;
        // the exact filter trims the result.
        hl.push_back(to_long_double(h) * (1 + 1e-9L));
      }
      H_exact_.push_back(std::move(hq));
      H_.push_back(std::move(hl));
    }

    BoundingBox box = bounding_box(spec);
    auto widths = box.at(spec, to_long_double(analysis.d_max() * T));
    a_bound_ = static_cast<i64>(std::floor(widths[0])) + 1;
    b_clip_ = static_cast<long double>(std::floor(widths[1])) + 1;
    if (widths[0] > 4e18 || widths[1] > 4e18) throw BudgetExceeded("coordinate range exceeds 64 bits");

    auto mods = analysis.global_moduli();
    M1_ = mods.empty() ? 1 : mods[0].get_si();
    M2_ = mods.empty() ? 1 : mods[1].get_si();
    if (static_cast<double>(M1_) * static_cast<double>(M2_) > double(1 << 26))
      throw std::runtime_error("residue table too large");
    table_.assign(static_cast<std::size_t>(M1_ * M2_), -1);
    for (i64 ra = 0; ra < M1_; ++ra)
      for (i64 rb = 0; rb < M2_; ++rb) table_[ra + M1_ * rb] = label_of_residue(ra, rb);
    classes_.assign(static_cast<std::size_t>(M1_), std::vector<std::vector<i64>>(D_.size()));
    for (i64 ra = 0; ra < M1_; ++ra)
      for (i64 rb = 0; rb < M2_; ++rb) {
        int di = table_[ra + M1_ * rb];
        if (di >= 0) classes_[ra][di].push_back(rb);
      }
  }

  std::size_t discrepancy_count() const { return D_.size(); }
  const Rational& discrepancy(std::size_t i) const { return D_[i]; }
  i64 a_bound() const { return a_bound_; }

  /// Index into 𝒟 of the class of (a, b), or -1 when the class carries an unrealized label.
  int label_index(i64 a, i64 b) const {
    i64 ra = ((a % M1_) + M1_) % M1_, rb = ((b % M2_) + M2_) % M2_;
    return table_[ra + M1_ * rb];
  }

  /// S_{u,∞}(φ(a, b)) <= D_di · T, exactly.
  bool admissible(i64 a, i64 b, std::size_t di) const {
    Integer x[2] = {Integer(static_cast<long>(a)), Integer(static_cast<long>(b))};
    for (std::size_t j = 0; j < spec_.polys.size(); ++j) {
      Integer F = spec_.polys[j].evaluate_scaled(std::span<const Integer>(x, 2));
      Integer lhs = abs(F) * H_exact_[di][j].get_den();
      Integer rhs = denominators_[j] * H_exact_[di][j].get_num();
      if (lhs > rhs) return false;
    }
    return true;
  }

  bool primitive(i64 a, i64 b) const {
    if (a == 0 && b == 0) return false;
    std::uint64_t g = std::gcd(static_cast<std::uint64_t>(a < 0 ? -a : a), static_cast<std::uint64_t>(b < 0 ? -b : b));
    if (g == 1) return true;
    for (const auto& [p, k] : factor_u64(g)) {
      (void)k;
      bool a_ok = a == 0 || valuation(Integer(static_cast<long>(a)), p) >= w1_;
      bool b_ok = b == 0 || valuation(Integer(static_cast<long>(b)), p) >= w2_;
      if (a_ok && b_ok) return false;
    }
    return true;
  }

  /// Integer points of the admissible x2-set for (a, D_di), merged and ascending.
  std::vector<Range> ranges(i64 a, std::size_t di) const {
    auto segs = admissible_slice(spec_, static_cast<long double>(a), H_[di], -b_clip_, b_clip_);
    std::vector<Range> out;
    const i64 lo_clip = -static_cast<i64>(b_clip_), hi_clip = static_cast<i64>(b_clip_);
    for (const auto& [slo, shi] : segs) {
      long double eps = 1e-6L * std::max(1.0L, std::max(std::fabs(slo), std::fabs(shi)));
      i64 L = std::max(lo_clip, static_cast<i64>(std::ceil(slo - eps)));
      i64 U = std::min(hi_clip, static_cast<i64>(std::floor(shi + eps)));
      int steps = 0;
      while (L <= U && !admissible(a, L, di)) {
        ++L;
        if (++steps > 64) throw std::logic_error("slice endpoint drifted by more than 64 integers");
      }
      if (L > U) continue;
      steps = 0;
      while (!admissible(a, U, di)) {
        --U;
        if (++steps > 64) throw std::logic_error("slice endpoint drifted by more than 64 integers");
      }
      steps = 0;
      while (L > lo_clip && admissible(a, L - 1, di)) {
        --L;
        if (++steps > 64) throw std::logic_error("slice endpoint drifted by more than 64 integers");
      }
      steps = 0;
      while (U < hi_clip && admissible(a, U + 1, di)) {
        ++U;
        if (++steps > 64) throw std::logic_error("slice endpoint drifted by more than 64 integers");
      }
      out.emplace_back(L, U);
    }
    std::sort(out.begin(), out.end());
    std::vector<Range> merged;
    for (const auto& r : out) {
      if (!merged.empty() && r.first <= merged.back().second + 1)
        merged.back().second = std::max(merged.back().second, r.second);
      else
        merged.push_back(r);
    }
    return merged;
  }

  /// Number of primitive vectors (a, b) with b in the given ranges and label D_di.
  std::uint64_t count_row(i64 a, std::size_t di, const std::vector<Range>& rs) const {
    const auto& residues = classes_[((a % M1_) + M1_) % M1_][di];
    if (residues.empty() || rs.empty()) return 0;
    i64 total = 0;
    if (a != 0) {
      std::vector<i64> pk;
      for (const auto& [p, k] : factor_u64(static_cast<std::uint64_t>(a < 0 ? -a : a)))
        if (k >= w1_) pk.push_back(ipow_clamped(static_cast<i64>(p), w2_));
      std::size_t n = pk.size();
      for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        i128 K = 1;
        for (std::size_t i = 0; i < n; ++i)
          if (mask & (std::uint64_t(1) << i)) K = std::min<i128>(K * pk[i], i128(1) << 100);
        int sign = (std::popcount(mask) % 2) ? -1 : 1;
        for (const auto& [lo, hi] : rs)
          for (i64 r : residues) total += sign * count_congruent(lo, hi, r, M2_, K);
      }
      return static_cast<std::uint64_t>(total);
    }
    // a = 0: b != 0 primitive iff no p^{w2} divides b.
    i64 maxabs = 0;
    for (const auto& [lo, hi] : rs) maxabs = std::max({maxabs, lo < 0 ? -lo : lo, hi < 0 ? -hi : hi});
    i64 kmax = integer_root(maxabs, w2_);
    auto mu = moebius_table(static_cast<std::uint64_t>(std::max<i64>(kmax, 1)));
    for (i64 k = 1; k <= kmax; ++k) {
      if (mu[k] == 0) continue;
      i128 K = ipow_clamped(k, w2_);
      for (const auto& [lo, hi] : rs)
        for (i64 r : residues) {
          i64 c = count_congruent(lo, std::min<i64>(hi, -1), r, M2_, K) +
                  count_congruent(std::max<i64>(lo, 1), hi, r, M2_, K);
          total += mu[k] * c;
        }
    }
    return static_cast<std::uint64_t>(total);
  }

 private:
  int label_of_residue(i64 ra, i64 rb) const {
    Rational d = 1;
    for (const auto& [p, prof] : analysis_.profiles) {
      long x[2] = {static_cast<long>(ra), static_cast<long>(rb)};
      long j = prof.label(std::span<const long>(x, 2));
      if (!prof.realized.count(j)) return -1;
      Integer pp;
      mpz_ui_pow_ui(pp.get_mpz_t(), p, static_cast<unsigned long>(j < 0 ? -j : j));
      if (j >= 0)
        d *= pp;
      else
        d /= pp;
    }
    auto it = std::find(D_.begin(), D_.end(), d);
    return it == D_.end() ? -1 : static_cast<int>(it - D_.begin());
  }

  const MorphismSpec& spec_;
  const GlobalAnalysis& analysis_;
  Rational T_;
  int w1_ = 1, w2_ = 1;
  std::vector<Rational> D_;
  std::vector<Integer> denominators_;
  std::vector<std::vector<Rational>> H_exact_;
  std::vector<std::vector<long double>> H_;
  i64 a_bound_ = 0;
  long double b_clip_ = 0;
  i64 M1_ = 1, M2_ = 1;
  std::vector<int> table_;
  std::vector<std::vector<std::vector<i64>>> classes_;
};

void check_budget(const Scanner& sc, const CountOptions& opts) {
  long double cells = (2.0L * sc.a_bound() + 1) * sc.discrepancy_count();
  if (cells > static_cast<long double>(opts.budget))
    throw BudgetExceeded("x1 scan needs " + std::to_string(static_cast<unsigned long long>(cells)) +
                         " cells, above the budget of " + std::to_string(opts.budget) + "; raise it with --budget");
}

/// Singular vectors of X1(2) (b = 0 or 8b = 3a^2) counted in row a, per discrepancy.
void subtract_singular(const Scanner& sc, i64 a, std::vector<std::uint64_t>& counts) {
  std::vector<i64> bs;
  if (a != 0) bs.push_back(0);
  i128 num = i128(3) * a * a;
  if (num % 8 == 0 && num / 8 != 0) bs.push_back(static_cast<i64>(num / 8));
  for (i64 b : bs) {
    if (!sc.primitive(a, b)) continue;
    int di = sc.label_index(a, b);
    if (di < 0) continue;
    if (sc.admissible(a, b, static_cast<std::size_t>(di))) --counts[di];
  }
}

struct Checkpoint {
  std::string path;
  std::map<std::size_t, std::vector<std::uint64_t>> done;
  std::mutex mu;
  std::ofstream out;

  void open(const nlohmann::ordered_json& header) {
    if (path.empty()) return;
    std::ifstream in(path);
    std::string line;
    bool have_header = false;
    if (in && std::getline(in, line) && !line.empty()) {
      auto h = nlohmann::ordered_json::parse(line);
      if (h != header) throw std::runtime_error("checkpoint " + path + " belongs to a different run");
      have_header = true;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
          rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
          break;  // torn final line from an interrupted run
        }
        done[rec.at("slab").get<std::size_t>()] = rec.at("counts").get<std::vector<std::uint64_t>>();
      }
    }
    in.close();
    out.open(path, have_header ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    if (!have_header) out << header.dump() << "\n" << std::flush;
  }

  void record(std::size_t slab, const std::vector<std::uint64_t>& counts) {
    if (path.empty()) return;
    std::lock_guard<std::mutex> lock(mu);
    nlohmann::ordered_json rec;
    rec["slab"] = slab;
    rec["counts"] = counts;
    out << rec.dump() << "\n" << std::flush;
  }
};

}  // namespace

CountResult count_exact(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                        const CountOptions& opts) {
  if (opts.exclude_singular && !is_x1_2(spec))
    throw std::invalid_argument("--exclude-singular is defined for the X1(2) fixture only");
  Scanner sc(spec, analysis, T);
  check_budget(sc, opts);
  const i64 A = sc.a_bound();
  const i64 S = std::max<i64>(1, opts.slab_size);
  const std::size_t n_slabs = static_cast<std::size_t>((2 * A + 1 + S - 1) / S);
  const std::size_t nd = sc.discrepancy_count();

  Checkpoint ck;
  ck.path = opts.checkpoint;
  nlohmann::ordered_json header;
  header["spec"] = spec_fingerprint(spec);
  header["T"] = to_string(T);
  header["slab_size"] = S;
  header["x1_bound"] = A;
  header["exclude_singular"] = opts.exclude_singular;
  ck.open(header);

  std::vector<std::vector<std::uint64_t>> slab_counts(n_slabs);
  std::size_t resumed = 0;
  for (const auto& [k, c] : ck.done)
    if (k < n_slabs && c.size() == nd) {
      slab_counts[k] = c;
      ++resumed;
    }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    try {
      for (std::size_t k; (k = next++) < n_slabs;) {
        if (!slab_counts[k].empty()) continue;
        std::vector<std::uint64_t> counts(nd, 0);
        i64 a_lo = -A + static_cast<i64>(k) * S, a_hi = std::min(A, a_lo + S - 1);
        for (i64 a = a_lo; a <= a_hi; ++a) {
          for (std::size_t di = 0; di < nd; ++di) counts[di] += sc.count_row(a, di, sc.ranges(a, di));
          if (opts.exclude_singular) subtract_singular(sc, a, counts);
        }
        ck.record(k, counts);
        slab_counts[k] = std::move(counts);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (!failure) failure = std::current_exception();
      next = n_slabs;
    }
  };
  int nt = std::max(1, opts.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  CountResult res;
  res.x1_bound = A;
  res.slabs = n_slabs;
  res.slabs_resumed = resumed;
  std::vector<std::uint64_t> per_d(nd, 0);
  for (const auto& c : slab_counts)
    for (std::size_t di = 0; di < nd; ++di) per_d[di] += c[di];
  for (std::size_t di = 0; di < nd; ++di) {
    res.vectors += per_d[di];
    Rational m(Integer(static_cast<unsigned long>(per_d[di])), 2);
    m.canonicalize();
    res.by_discrepancy[sc.discrepancy(di)] = m;
  }
  res.mass = Rational(Integer(static_cast<unsigned long>(res.vectors)), 2);
  res.mass.canonicalize();
  return res;
}

std::map<Rational, Rational> count_by_discrepancy(const MorphismSpec& spec, const GlobalAnalysis& analysis,
                                                  const Rational& T, const CountOptions& opts) {
  return count_exact(spec, analysis, T, opts).by_discrepancy;
}

void enumerate_points(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                      const std::function<void(const PointRecord&)>& visit, const CountOptions& opts) {
  if (opts.exclude_singular && !is_x1_2(spec))
    throw std::invalid_argument("--exclude-singular is defined for the X1(2) fixture only");
  Scanner sc(spec, analysis, T);
  check_budget(sc, opts);
  const int w1 = spec.source[0], w2 = spec.source[1];
  const i64 A = sc.a_bound();
  for (i64 a = -A; a <= A; ++a)
    for (std::size_t di = 0; di < sc.discrepancy_count(); ++di)
      for (const auto& [lo, hi] : sc.ranges(a, di))
        for (i64 b = lo; b <= hi; ++b) {
          if (sc.label_index(a, b) != static_cast<int>(di) || !sc.primitive(a, b)) continue;
          if (opts.exclude_singular && (b == 0 || i128(8) * b == i128(3) * a * a)) continue;
          i64 na = (w1 % 2) ? -a : a, nb = (w2 % 2) ? -b : b;
          if (std::make_pair(na, nb) < std::make_pair(a, b)) continue;
          bool fixed = na == a && nb == b;
          visit(PointRecord{a, b, sc.discrepancy(di), Rational(1, fixed ? 2 : 1)});
        }
}

MoebiusReport moebius_crosscheck(const MorphismSpec& spec, const GlobalAnalysis& analysis, const Rational& T,
                                 std::uint64_t prime_cut) {
  Scanner sc(spec, analysis, T);
  const int w1 = spec.source[0], w2 = spec.source[1];
  auto mu = moebius_table(std::max<std::uint64_t>(prime_cut, 1));
  MoebiusReport rep;
  std::map<std::size_t, std::map<std::uint64_t, Integer>> lattice;  // di -> c -> count
  std::vector<Integer> lhs(sc.discrepancy_count(), 0);
  const i64 A = sc.a_bound();
  for (i64 a = -A; a <= A; ++a)
    for (std::size_t di = 0; di < sc.discrepancy_count(); ++di)
      for (const auto& [lo, hi] : sc.ranges(a, di))
        for (i64 b = lo; b <= hi; ++b) {
          if ((a == 0 && b == 0) || sc.label_index(a, b) != static_cast<int>(di)) continue;
          // n = positive generator of I_w(a, b).
          std::uint64_t n = 1;
          std::uint64_t g = std::gcd(static_cast<std::uint64_t>(a < 0 ? -a : a),
                                     static_cast<std::uint64_t>(b < 0 ? -b : b));
          if (g > 1)
            for (const auto& [p, k] : factor_u64(g)) {
              (void)k;
              long e = 1L << 40;
              if (a != 0) e = std::min(e, valuation(Integer(static_cast<long>(a)), p) / w1);
              if (b != 0) e = std::min(e, valuation(Integer(static_cast<long>(b)), p) / w2);
              for (long i = 0; i < e; ++i) n *= p;
            }
          rep.largest_scaling_ideal = std::max(rep.largest_scaling_ideal, n);
          if (n == 1) lhs[di] += 1;
          for (std::uint64_t c = 1; c <= prime_cut && c <= n; ++c)
            if (mu[c] != 0 && n % c == 0) lattice[di][c] += 1;
        }
  rep.tail_certified = rep.largest_scaling_ideal <= prime_cut;
  rep.pass = rep.tail_certified;
  if (!rep.tail_certified)
    rep.witness = "scaling ideal (" + std::to_string(rep.largest_scaling_ideal) + ") exceeds the cut";
  for (std::size_t di = 0; di < sc.discrepancy_count(); ++di) {
    Integer rhs = 0;
    for (const auto& [c, cnt] : lattice[di]) {
      rhs += mu[c] * cnt;
      rep.lattice_counts[c] += cnt;
    }
    rep.by_discrepancy[sc.discrepancy(di)] = {lhs[di], rhs};
    rep.lhs_mass += Rational(lhs[di], 2);
    if (lhs[di] != rhs && rep.pass) {
      rep.pass = false;
      rep.witness = "d = " + to_string(sc.discrepancy(di)) + ": lhs " + lhs[di].get_str() + " != rhs " + rhs.get_str();
    }
  }
  rep.lhs_mass.canonicalize();
  return rep;
}

CountReport convergence_report(const MorphismSpec& spec, const GlobalAnalysis& analysis,
                               const AsymptoticPrediction& prediction, const std::vector<Rational>& ladder,
                               const CountOptions& opts) {
  if (!std::is_sorted(ladder.begin(), ladder.end())) throw std::invalid_argument("ladder must be ascending");
  CountReport rep;
  rep.ladder = ladder;
  rep.prediction = prediction;
  rep.expected_rate = static_cast<long double>(spec.source.min()) / spec.e;
  const long double expo = to_long_double(prediction.exponent);
  for (const Rational& T : ladder) {
    Rational m = count_exact(spec, analysis, T, opts).mass;
    long double f = to_long_double(m) / std::pow(to_long_double(T), expo);
    rep.masses.push_back(m);
    rep.fitted.push_back(f);
    rep.relative_gaps.push_back(std::fabs(f - prediction.leading_constant) / prediction.leading_constant);
  }
  // Broadly shrinking: the last gap beats the first, and no rung more than doubles the previous gap.
  const auto& g = rep.relative_gaps;
  if (g.size() >= 2) {
    rep.shrinking = g.back() <= g.front();
    for (std::size_t i = 1; i < g.size(); ++i)
      if (g[i] > 2 * g[i - 1] + 1e-4L) rep.shrinking = false;
  }
  return rep;
}

}  // namespace wpc
