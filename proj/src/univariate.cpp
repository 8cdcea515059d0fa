#include "wpc/univariate.hpp"

#include <cmath>
#include <stdexcept>

namespace wpc {

std::pair<QPoly, QPoly> divrem(const QPoly& a, const QPoly& b) {
  if (b.zero()) throw DomainError("divrem: division by zero polynomial");
  std::vector<Rational> r = a.coeffs();
  int db = b.degree();
  if (a.degree() < db) return {QPoly(), a};
  std::vector<Rational> q(a.degree() - db + 1);
  Rational lc = b.leading();
  for (int k = a.degree(); k >= db; --k) {
    Rational c = r[k] / lc;
    q[k - db] = c;
    if (sgn(c) == 0) continue;
    for (int i = 0; i <= db; ++i) r[k - db + i] -= c * b.coeffs()[i];
  }
  r.resize(db);
  return {QPoly(std::move(q)), QPoly(std::move(r))};
}

QPoly divexact(const QPoly& a, const QPoly& b) {
  auto [q, r] = divrem(a, b);
  if (!r.zero()) throw std::logic_error("divexact: remainder is nonzero");
  return q;
}

QPoly gcd(QPoly a, QPoly b) {
  while (!b.zero()) {
    QPoly r = divrem(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.zero()) return a;
  return a.scaled(1 / a.leading());
}

QPoly squarefree_part(const QPoly& p) {
  if (p.degree() <= 0) return p;
  QPoly g = gcd(p, p.derivative());
  QPoly s = divexact(p, g);
  return s.scaled(1 / s.leading());
}

Rational resultant(const QPoly& f0, const QPoly& g0) {
  if (f0.zero() || g0.zero()) return 0;
  QPoly f = f0, g = g0;
  Rational res = 1;
  while (g.degree() > 0) {
    QPoly r = divrem(f, g).second;
    if (r.zero()) return 0;
    int m = f.degree(), n = g.degree();
    if ((m % 2 == 1) && (n % 2 == 1)) res = -res;
    Rational lc = g.leading();
    Rational pw = 1;
    for (int i = 0; i < m - r.degree(); ++i) pw *= lc;
    res *= pw;
    f = std::move(g);
    g = std::move(r);
  }
  Rational g_const = g.coeffs()[0];
  for (int i = 0; i < f.degree(); ++i) res *= g_const;
  return res;
}

QPoly resultant(const QBiPoly& f, const QBiPoly& g) {
  if (f.zero() || g.zero()) return QPoly();
  int m = f.degree(), n = g.degree();
  int size = m + n;
  if (size == 0) return QPoly::constant(1);
  std::vector<std::vector<QPoly>> M(size, std::vector<QPoly>(size));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) M[i][i + k] = f.coeff(m - k);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) M[n + i][i + k] = g.coeff(n - k);
  // Fraction-free Bareiss elimination; every division below is exact in ℚ[a].
  QPoly prev = QPoly::constant(1);
  bool negate = false;
  for (int k = 0; k < size - 1; ++k) {
    if (M[k][k].zero()) {
      int swap = -1;
      for (int i = k + 1; i < size; ++i)
        if (!M[i][k].zero()) {
          swap = i;
          break;
        }
      if (swap < 0) return QPoly();
      std::swap(M[k], M[swap]);
      negate = !negate;
    }
    for (int i = k + 1; i < size; ++i) {
      for (int j = k + 1; j < size; ++j)
        M[i][j] = divexact(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev);
      M[i][k] = QPoly();
    }
    prev = M[k][k];
  }
  QPoly det = M[size - 1][size - 1];
  return negate ? -det : det;
}

QBiPoly derivative_outer(const QBiPoly& f) {
  std::vector<QPoly> d;
  for (int k = 1; k <= f.degree(); ++k) d.push_back(f.coeffs()[k].scaled(Rational(k)));
  return QBiPoly(std::move(d));
}

RealPoly to_real(const QPoly& p) {
  std::vector<long double> v;
  for (const auto& c : p.coeffs()) v.push_back(to_long_double(c));
  return RealPoly(std::move(v));
}

namespace {

std::vector<QPoly> sturm_sequence(const QPoly& p) {
  std::vector<QPoly> seq{squarefree_part(p)};
  seq.push_back(seq[0].derivative());
  while (!seq.back().zero() && seq.back().degree() > 0) {
    QPoly r = divrem(seq[seq.size() - 2], seq.back()).second;
    if (r.zero()) break;
    seq.push_back(-r);
  }
  return seq;
}

int sign_variations(const std::vector<QPoly>& seq, const Rational& x) {
  int count = 0, last = 0;
  for (const auto& q : seq) {
    int s = sgn(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

Rational cauchy_bound(const QPoly& p) {
  Rational mx = 0;
  for (int k = 0; k < p.degree(); ++k) mx = std::max(mx, Rational(abs(p.coeffs()[k] / p.leading())));
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), mx.get_num_mpz_t(), mx.get_den_mpz_t());
  return Rational(c + 1);
}

}  // namespace

int count_real_roots(const QPoly& p, const Rational& lo, const Rational& hi) {
  if (p.zero()) throw DomainError("count_real_roots: zero polynomial");
  if (p.degree() == 0) return 0;
  auto seq = sturm_sequence(p);
  return sign_variations(seq, lo) - sign_variations(seq, hi);
}

std::vector<RootBracket> isolate_real_roots(const QPoly& p) {
  if (p.zero()) throw DomainError("isolate_real_roots: zero polynomial");
  std::vector<RootBracket> out;
  if (p.degree() == 0) return out;
  auto seq = sturm_sequence(p);
  Rational R = cauchy_bound(seq[0]);
  struct Item {
    Rational lo, hi;
    int vlo, vhi;
  };
  std::vector<Item> stack{{-R, R, sign_variations(seq, -R), sign_variations(seq, R)}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    int n = it.vlo - it.vhi;
    if (n <= 0) continue;
    if (n == 1) {
      out.push_back({it.lo, it.hi});
      continue;
    }
    Rational mid = (it.lo + it.hi) / 2;
    int vm = sign_variations(seq, mid);
    stack.push_back({mid, it.hi, vm, it.vhi});
    stack.push_back({it.lo, mid, it.vlo, vm});
  }
  std::sort(out.begin(), out.end(), [](const RootBracket& a, const RootBracket& b) { return a.hi < b.hi; });
  return out;
}

RootBracket refine_root(const QPoly& p, RootBracket b, const Rational& tol) {
  auto seq = sturm_sequence(p);
  const QPoly& s = seq[0];
  if (sgn(s(b.hi)) == 0) return {b.hi, b.hi};
  int vlo = sign_variations(seq, b.lo);
  while (b.hi - b.lo > tol) {
    Rational mid = (b.lo + b.hi) / 2;
    if (sgn(s(mid)) == 0) return {mid, mid};
    int vm = sign_variations(seq, mid);
    if (vlo - vm == 1) {
      b.hi = mid;
    } else {
      b.lo = mid;
      vlo = vm;
    }
  }
  return b;
}

std::vector<long double> certified_real_roots(const QPoly& p) {
  std::vector<long double> out;
  const Rational tol(1, mpz_class(1) << 80);
  for (auto b : isolate_real_roots(p)) {
    auto r = refine_root(p, b, tol);
    out.push_back(to_long_double((r.lo + r.hi) / 2));
  }
  return out;
}

namespace {

long double bisect(const RealPoly& p, long double lo, long double hi, long double flo) {
  for (int it = 0; it < 20000; ++it) {
    long double mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) break;
    long double fm = p(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

}  // namespace

std::vector<long double> real_roots(const RealPoly& p) {
  std::vector<long double> out;
  int n = p.degree();
  if (n <= 0) return out;
  const auto& c = p.coeffs();
  if (n == 1) {
    out.push_back(-c[0] / c[1]);
    return out;
  }
  long double bound = 0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::fabs(c[k] / c[n]));
  bound += 1;
  std::vector<long double> pts{-bound};
  for (long double x : real_roots(p.derivative()))
    if (x > -bound && x < bound) pts.push_back(x);
  pts.push_back(bound);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    long double a = pts[i], b = pts[i + 1];
    long double fa = p(a), fb = p(b);
    if (fa == 0) {
      if (out.empty() || out.back() != a) out.push_back(a);
      continue;
    }
    if (fb == 0) continue;  // picked up as the left end of the next segment
    if ((fa < 0) != (fb < 0)) out.push_back(bisect(p, a, b, fa));
  }
  return out;
}

}  // namespace wpc
