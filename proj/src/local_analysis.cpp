#include "wpc/local_analysis.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <climits>
#include <optional>
#include <thread>

#include "wpc/asymptotics.hpp"

namespace wpc {

bool LocalProfile::trivial_modulus() const {
  return std::all_of(modulus_exponents.begin(), modulus_exponents.end(), [](int s) { return s == 0; });
}

std::vector<Integer> LocalProfile::moduli() const {
  std::vector<Integer> out;
  for (int s : modulus_exponents) {
    Integer q;
    mpz_ui_pow_ui(q.get_mpz_t(), p, s);
    out.push_back(q);
  }
  return out;
}

std::size_t LocalProfile::class_index(std::span<const Integer> x) const {
  std::size_t idx = 0, stride = 1;
  auto mods = moduli();
  for (std::size_t i = 0; i < mods.size(); ++i) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), x[i].get_mpz_t(), mods[i].get_mpz_t());
    idx += r.get_ui() * stride;
    stride *= mods[i].get_ui();
  }
  return idx;
}

std::size_t LocalProfile::class_index(std::span<const long> x) const {
  std::size_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < modulus_exponents.size(); ++i) {
    long q = 1;
    for (int k = 0; k < modulus_exponents[i]; ++k) q *= static_cast<long>(p);
    long r = x[i] % q;
    if (r < 0) r += q;
    idx += static_cast<std::size_t>(r) * stride;
    stride *= static_cast<std::size_t>(q);
  }
  return idx;
}

std::vector<long> LocalProfile::class_residues(std::size_t index) const {
  std::vector<long> r;
  for (int s : modulus_exponents) {
    long q = 1;
    for (int k = 0; k < s; ++k) q *= static_cast<long>(p);
    r.push_back(static_cast<long>(index % q));
    index /= q;
  }
  return r;
}

namespace {

constexpr long kInf = LONG_MAX / 4;

struct IntPoly {
  std::vector<std::pair<Exponents, Integer>> terms;
  long offset = 0;  ///< ord_p of the cleared denominator
  int u = 1;
};

struct Cell {
  std::vector<Integer> r;
  std::vector<int> t;
};

enum class Primitivity { Primitive, NonPrimitive, Mixed };

class Refiner {
 public:
  Refiner(const MorphismSpec& spec, std::uint64_t p, int max_level)
      : p_(p), m_(spec.dim()), w_(spec.source.values()), max_level_(max_level) {
    for (std::size_t i = 0; i < spec.polys.size(); ++i) {
      const auto& f = spec.polys[i];
      if (f.zero()) continue;
      IntPoly F;
      Integer D = f.denominator();
      F.offset = valuation(D, p);
      F.u = spec.target[i];
      for (const auto& [k, c] : f.terms()) F.terms.emplace_back(k, Integer(c.get_num() * (D / c.get_den())));
      polys_.push_back(std::move(F));
    }
  }

  const Integer& ppow(int t) {
    while (static_cast<int>(pows_.size()) <= t) {
      if (pows_.empty())
        pows_.push_back(1);
      else
        pows_.push_back(pows_.back() * p_);
    }
    return pows_[t];
  }

  Cell root() const { return Cell{std::vector<Integer>(m_, 0), std::vector<int>(m_, 0)}; }

  void check_level(const Cell& c) const {
    for (int t : c.t)
      if (t > max_level_)
        throw StabilizationError("local profile did not stabilize below K_max = " + std::to_string(max_level_) +
                                 " at p = " + std::to_string(p_));
  }

  Primitivity primitivity(const Cell& c) {
    bool all_deep = true;
    for (std::size_t i = 0; i < m_; ++i) {
      if (c.t[i] >= w_[i]) {
        Integer r;
        mpz_fdiv_r(r.get_mpz_t(), c.r[i].get_mpz_t(), ppow(w_[i]).get_mpz_t());
        if (r != 0) return Primitivity::Primitive;
      } else {
        if (c.r[i] != 0) return Primitivity::Primitive;
        all_deep = false;
      }
    }
    return all_deep ? Primitivity::NonPrimitive : Primitivity::Mixed;
  }

  std::size_t undecided_coordinate(const Cell& c) const {
    for (std::size_t i = 0; i < m_; ++i)
      if (c.t[i] < w_[i] && c.r[i] == 0) return i;
    return 0;
  }

  /// Coordinate with the smallest t_i / w_i.
  std::size_t split_coordinate(const Cell& c) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (static_cast<long>(c.t[i]) * w_[best] < static_cast<long>(c.t[best]) * w_[i]) best = i;
    return best;
  }

  std::vector<Cell> children(const Cell& c, std::size_t i) {
    std::vector<Cell> out;
    const Integer& step = ppow(c.t[i]);
    for (std::uint64_t k = 0; k < p_; ++k) {
      Cell d = c;
      d.r[i] = c.r[i] + step * k;
      d.t[i] = c.t[i] + 1;
      out.push_back(std::move(d));
    }
    return out;
  }

  /// Bounds on g(x) = min_i floor(ord_p f_i(x) / u_i) over the cell; hi = kInf when no
  /// f_i has a constant valuation there.
  std::pair<long, long> bounds(const Cell& c) {
    long lo = kInf, hi = kInf;
    for (const auto& F : polys_) {
      std::map<Exponents, Integer> coef;
      for (const auto& [k, a] : F.terms) {
        // (r_j + P_j y_j)^{k_j} expanded per variable
        std::vector<std::vector<Integer>> parts(m_);
        for (std::size_t j = 0; j < m_; ++j) {
          int n = k[j];
          parts[j].resize(n + 1);
          Integer binom = 1;
          for (int e = 0; e <= n; ++e) {
            Integer rp, pp;
            mpz_pow_ui(rp.get_mpz_t(), c.r[j].get_mpz_t(), n - e);
            mpz_pow_ui(pp.get_mpz_t(), ppow(c.t[j]).get_mpz_t(), e);
            parts[j][e] = binom * rp * pp;
            binom = binom * (n - e) / (e + 1);
          }
        }
        Exponents idx(m_, 0);
        for (;;) {
          Integer v = a;
          for (std::size_t j = 0; j < m_; ++j) v *= parts[j][idx[j]];
          if (v != 0) coef[idx] += v;
          std::size_t j = 0;
          while (j < m_ && ++idx[j] > k[j]) idx[j++] = 0;
          if (j == m_) break;
        }
      }
      long v0 = kInf, vr = kInf;
      for (const auto& [k, v] : coef) {
        if (v == 0) continue;
        long val = valuation(v, p_);
        bool constant = std::all_of(k.begin(), k.end(), [](int e) { return e == 0; });
        if (constant)
          v0 = val;
        else
          vr = std::min(vr, val);
      }
      long vlo = std::min(v0, vr);
      if (vlo < kInf) lo = std::min(lo, floor_div(vlo - F.offset, F.u));
      if (v0 < vr) hi = std::min(hi, floor_div(v0 - F.offset, F.u));
    }
    return {lo, hi};
  }

  std::set<long> realized_values() {
    std::set<long> J;
    std::vector<Cell> stack{root()};
    while (!stack.empty()) {
      Cell c = std::move(stack.back());
      stack.pop_back();
      check_level(c);
      auto kind = primitivity(c);
      if (kind == Primitivity::NonPrimitive) continue;
      if (kind == Primitivity::Mixed) {
        for (auto& d : children(c, undecided_coordinate(c))) stack.push_back(std::move(d));
        continue;
      }
      auto [lo, hi] = bounds(c);
      if (hi < kInf && lo == hi) {
        J.insert(lo);
        continue;
      }
      for (auto& d : children(c, split_coordinate(c))) stack.push_back(std::move(d));
    }
    return J;
  }

  /// The capped value if it is constant on the cell.
  std::optional<long> constant_label(const Cell& cell, long cap) {
    std::optional<long> value;
    std::vector<Cell> stack{cell};
    while (!stack.empty()) {
      Cell c = std::move(stack.back());
      stack.pop_back();
      check_level(c);
      auto [lo, hi] = bounds(c);
      lo = std::min(lo, cap);
      hi = std::min(hi, cap);
      if (lo == hi) {
        if (value && *value != lo) return std::nullopt;
        value = lo;
        continue;
      }
      for (auto& d : children(c, split_coordinate(c))) stack.push_back(std::move(d));
    }
    return value;
  }

  std::optional<std::vector<long>> try_modulus(const std::vector<int>& s, long cap) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < m_; ++i) {
      const Integer& q = ppow(s[i]);
      if (!q.fits_ulong_p() || count > (std::size_t(1) << 26) / q.get_ui())
        throw StabilizationError("local modulus at p = " + std::to_string(p_) + " has too many classes");
      count *= q.get_ui();
    }
    std::vector<long> labels(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
      Cell c{std::vector<Integer>(m_), s};
      std::size_t rest = idx;
      for (std::size_t i = 0; i < m_; ++i) {
        std::size_t q = ppow(s[i]).get_ui();
        c.r[i] = static_cast<unsigned long>(rest % q);
        rest /= q;
      }
      auto v = constant_label(c, cap);
      if (!v) return std::nullopt;
      labels[idx] = *v;
    }
    return labels;
  }

  std::size_t dim() const { return m_; }
  int max_level() const { return max_level_; }

 private:
  std::uint64_t p_;
  std::size_t m_;
  std::vector<int> w_;
  int max_level_;
  std::vector<IntPoly> polys_;
  std::vector<Integer> pows_;
};

void compositions(std::size_t m, int total, int cap, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == m) {
    if (total <= cap) {
      cur.push_back(total);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int k = 0; k <= std::min(total, cap); ++k) {
    cur.push_back(k);
    compositions(m, total - k, cap, cur, out);
    cur.pop_back();
  }
}

}  // namespace

LocalProfile local_profile(const MorphismSpec& spec, std::uint64_t p, int max_level) {
  if (!is_prime(p)) throw DomainError("local_profile: " + std::to_string(p) + " is not prime");
  Refiner ref(spec, p, max_level);
  LocalProfile prof;
  prof.p = p;
  prof.realized = ref.realized_values();
  long cap = *prof.realized.rbegin();
  // Smallest total level first, lexicographic within a level.
  for (int total = 0; total <= static_cast<int>(ref.dim()) * max_level; ++total) {
    std::vector<std::vector<int>> cands;
    std::vector<int> cur;
    compositions(ref.dim(), total, max_level, cur, cands);
    for (const auto& s : cands) {
      if (auto labels = ref.try_modulus(s, cap)) {
        prof.modulus_exponents = s;
        prof.labels = std::move(*labels);
        return prof;
      }
    }
  }
  throw StabilizationError("local profile did not stabilize below K_max = " + std::to_string(max_level) +
                           " at p = " + std::to_string(p));
}

std::vector<std::uint64_t> candidate_primes(const MorphismSpec& spec) {
  bool nonunit_weight = false;
  for (int w : spec.source.values()) nonunit_weight = nonunit_weight || w > 1;
  if (spec.e > 1 && nonunit_weight)
    throw InfiniteDiscrepancy("discrepancy set may be infinite: e = " + std::to_string(spec.e) +
                              " > 1 with a source weight above 1 (scaling a primitive point by an e-th "
                              "root of p produces unbounded discrepancies)");
  if (spec.dim() != 2) throw std::invalid_argument("local analysis implemented for m=2 only");
  std::set<std::uint64_t> primes;
  auto add = [&](const Integer& n) {
    if (n == 0) return;
    for (auto [p, e] : factor(n)) primes.insert(p);
  };
  for (const auto& f : spec.polys)
    for (const auto& [k, c] : f.terms()) {
      add(c.get_num());
      add(c.get_den());
    }
  for (std::size_t fixed = 0; fixed < 2; ++fixed) {
    Rational res = resultant(spec.polys[0].dehomogenize(fixed), spec.polys[1].dehomogenize(fixed));
    if (sgn(res) == 0) throw InvalidMorphism(2, "vanishing resultant: common zero off the origin");
    add(res.get_num());
    add(res.get_den());
  }
  return {primes.begin(), primes.end()};
}

FactoredRational discrepancy(const MorphismSpec& spec, const WeightedPoint& x) {
  return scaling_ideal(evaluate(spec, x)) / scaling_ideal(x).pow(spec.e);
}

Rational GlobalAnalysis::discrepancy_of(std::span<const Integer> x) const {
  Rational d = 1;
  for (const auto& [p, prof] : profiles) {
    long j = prof.label(x);
    Integer pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), p, static_cast<unsigned long>(j < 0 ? -j : j));
    if (j >= 0)
      d *= pp;
    else
      d /= pp;
  }
  return d;
}

Rational GlobalAnalysis::discrepancy_of(std::span<const long> x) const {
  std::vector<Integer> z(x.begin(), x.end());
  return discrepancy_of(std::span<const Integer>(z));
}

Integer GlobalAnalysis::census_at(const Rational& d, const Integer& c1) const {
  auto it = census.find({d, c1});
  return it == census.end() ? Integer(0) : it->second;
}

std::vector<Integer> GlobalAnalysis::global_moduli() const {
  std::size_t m = profiles.empty() ? 0 : profiles.begin()->second.modulus_exponents.size();
  std::vector<Integer> out(m, 1);
  for (const auto& [p, prof] : profiles) {
    auto mods = prof.moduli();
    for (std::size_t i = 0; i < m; ++i) out[i] *= mods[i];
  }
  return out;
}

namespace {

/// Histogram of labels over residues mod p^t, t_i = max(s_i, w_i [in_c1]),
/// restricted to x_i ≡ 0 mod p^{w_i} when in_c1. Unrealized labels are dropped.
std::map<long, Integer> class_histogram(const LocalProfile& prof, const WeightVector& w, bool in_c1,
                                        int& level_sum) {
  std::size_t m = w.size();
  std::vector<unsigned long> count(m), step(m);
  level_sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    int s = prof.modulus_exponents[i];
    int t = in_c1 ? std::max(s, w[i]) : s;
    level_sum += t;
    int fixed = in_c1 ? w[i] : 0;
    unsigned long c = 1, st = 1;
    for (int k = 0; k < t - fixed; ++k) c *= prof.p;
    for (int k = 0; k < fixed; ++k) st *= prof.p;
    count[i] = c;
    step[i] = st;
  }
  std::map<long, Integer> hist;
  std::vector<unsigned long> idx(m, 0);
  std::vector<long> x(m);
  for (;;) {
    for (std::size_t i = 0; i < m; ++i) x[i] = static_cast<long>(idx[i] * step[i]);
    long j = prof.label(std::span<const long>(x));
    if (prof.realized.count(j)) hist[j] += 1;
    std::size_t i = 0;
    while (i < m && ++idx[i] == count[i]) idx[i++] = 0;
    if (i == m) break;
  }
  return hist;
}

}  // namespace

GlobalAnalysis global_analysis(const MorphismSpec& spec, int threads) {
  GlobalAnalysis ga;
  ga.candidates = candidate_primes(spec);

  std::vector<LocalProfile> profs(ga.candidates.size());
  std::vector<std::exception_ptr> errors(ga.candidates.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < ga.candidates.size();) {
      try {
        profs[k] = local_profile(spec, ga.candidates[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(ga.candidates.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& prof : profs) {
    if (prof.trivial()) continue;
    if (!prof.trivial_modulus()) ga.bad_primes.push_back(prof.p);
    ga.profiles.emplace(prof.p, std::move(prof));
  }

  // 𝒟 is the product set of per-prime realized values.
  std::vector<std::map<std::uint64_t, long>> combos{{}};
  for (const auto& [p, prof] : ga.profiles) {
    std::vector<std::map<std::uint64_t, long>> next_combos;
    for (const auto& c : combos)
      for (long j : prof.realized) {
        auto d = c;
        d[p] = j;
        next_combos.push_back(std::move(d));
      }
    combos = std::move(next_combos);
  }
  std::map<Rational, std::map<std::uint64_t, long>> by_value;
  for (const auto& c : combos) {
    std::map<std::uint64_t, long> nz;
    for (auto [p, j] : c)
      if (j != 0) nz[p] = j;
    by_value.emplace(FactoredRational::from_exponents(nz).value(), c);
  }
  for (const auto& [d, c] : by_value) ga.discrepancy_set.push_back(d);

  std::map<std::uint64_t, std::array<std::map<long, Integer>, 2>> hist;
  std::map<std::uint64_t, std::array<int, 2>> levels;
  for (std::uint64_t p : ga.bad_primes)
    for (int in = 0; in < 2; ++in)
      hist[p][in] = class_histogram(ga.profiles.at(p), spec.source, in == 1, levels[p][in]);

  std::size_t nbad = ga.bad_primes.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << nbad); ++mask) {
    Integer c1 = 1, index = 1;
    for (std::size_t k = 0; k < nbad; ++k) {
      std::uint64_t p = ga.bad_primes[k];
      int in = (mask >> k) & 1;
      if (in) c1 *= p;
      Integer pp;
      mpz_ui_pow_ui(pp.get_mpz_t(), p, levels[p][in]);
      index *= pp;
    }
    ga.modulus_index[c1] = index;
    for (const auto& [d, c] : by_value) {
      Integer n = 1;
      for (std::size_t k = 0; k < nbad; ++k) {
        std::uint64_t p = ga.bad_primes[k];
        const auto& h = hist[p][(mask >> k) & 1];
        auto it = h.find(c.at(p));
        n *= it == h.end() ? Integer(0) : it->second;
      }
      ga.census[{d, c1}] = n;
    }
  }
  ga.c_phi = c_phi(ga, spec);
  return ga;
}

}  // namespace wpc
