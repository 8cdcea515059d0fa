#include "wpc/morphism.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wpc {

WeightedPolynomial::WeightedPolynomial(std::map<Exponents, Rational> terms, WeightVector w)
    : terms_(std::move(terms)), w_(std::move(w)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first.size() != w_.size()) throw std::invalid_argument("exponent tuple length differs from m");
    if (sgn(it->second) == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
  for (const auto& [k, c] : terms_) {
    int d = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] < 0) throw std::invalid_argument("negative exponent");
      d += k[i] * w_[i];
    }
    if (degree_ >= 0 && d != degree_)
      throw InvalidMorphism(1, "not weighted-homogeneous: terms of weighted degree " + std::to_string(degree_) +
                                   " and " + std::to_string(d));
    degree_ = d;
  }
}

Rational WeightedPolynomial::operator()(std::span<const Rational> x) const {
  Rational acc = 0;
  for (const auto& [k, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < k.size(); ++i)
      for (int j = 0; j < k[i]; ++j) t *= x[i];
    acc += t;
  }
  return acc;
}

Integer WeightedPolynomial::evaluate_scaled(std::span<const Integer> x) const {
  Integer D = denominator();
  Integer acc = 0;
  for (const auto& [k, c] : terms_) {
    Integer t = c.get_num() * (D / c.get_den());
    for (std::size_t i = 0; i < k.size(); ++i)
      for (int j = 0; j < k[i]; ++j) t *= x[i];
    acc += t;
  }
  return acc;
}

long double WeightedPolynomial::evaluate(std::span<const long double> x) const {
  long double acc = 0;
  for (const auto& [k, c] : terms_) {
    long double t = to_long_double(c);
    for (std::size_t i = 0; i < k.size(); ++i)
      for (int j = 0; j < k[i]; ++j) t *= x[i];
    acc += t;
  }
  return acc;
}

Integer WeightedPolynomial::denominator() const {
  Integer D = 1;
  for (const auto& [k, c] : terms_) D = lcm(D, Integer(c.get_den()));
  return D;
}

QPoly WeightedPolynomial::dehomogenize(std::size_t fixed) const {
  if (w_.size() != 2) throw std::invalid_argument("dehomogenize: m = 2 only");
  std::size_t free = 1 - fixed;
  std::vector<Rational> v;
  for (const auto& [k, c] : terms_) {
    std::size_t deg = static_cast<std::size_t>(k[free]);
    if (v.size() <= deg) v.resize(deg + 1);
    v[deg] += c;
  }
  return QPoly(std::move(v));
}

QBiPoly WeightedPolynomial::as_bivariate() const {
  if (w_.size() != 2) throw std::invalid_argument("as_bivariate: m = 2 only");
  std::vector<std::vector<Rational>> rows;
  for (const auto& [k, c] : terms_) {
    std::size_t kb = static_cast<std::size_t>(k[1]), ka = static_cast<std::size_t>(k[0]);
    if (rows.size() <= kb) rows.resize(kb + 1);
    if (rows[kb].size() <= ka) rows[kb].resize(ka + 1);
    rows[kb][ka] += c;
  }
  std::vector<QPoly> coeffs;
  for (auto& r : rows) coeffs.emplace_back(std::move(r));
  return QBiPoly(std::move(coeffs));
}

std::string WeightedPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  // Highest exponent tuples first, matching how the fixtures are written.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [k, c] = *it;
    Rational a = abs(c);
    bool first = out.empty();
    if (sgn(c) < 0)
      out += first ? "-" : " - ";
    else if (!first)
      out += " + ";
    std::string mono;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (k[i] > 1) mono += "^" + std::to_string(k[i]);
    }
    if (mono.empty())
      out += a.get_str();
    else if (a == 1)
      out += mono;
    else
      out += a.get_str() + "*" + mono;
  }
  return out;
}

MorphismSpec make_morphism(std::string name, WeightVector w, WeightVector u, std::vector<WeightedPolynomial> polys) {
  if (u.size() != w.size()) throw InvalidMorphism(1, "source and target weights differ in length");
  if (polys.size() != u.size())
    throw InvalidMorphism(1, "expected " + std::to_string(u.size()) + " polynomials, got " +
                                 std::to_string(polys.size()));
  int e = -1;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (!(polys[i].weights() == w)) throw InvalidMorphism(1, "polynomial weights differ from source weights");
    if (polys[i].zero()) continue;
    int d = polys[i].degree();
    if (d % u[i] != 0)
      throw InvalidMorphism(1, "f" + std::to_string(i + 1) + " has weighted degree " + std::to_string(d) +
                                   ", not a multiple of u" + std::to_string(i + 1) + " = " + std::to_string(u[i]));
    int ei = d / u[i];
    if (e >= 0 && ei != e)
      throw InvalidMorphism(1, "not weighted-homogeneous of degree e*u_i: f" + std::to_string(i + 1) +
                                   " gives e = " + std::to_string(ei) + ", earlier polynomials give e = " +
                                   std::to_string(e));
    e = ei;
  }
  if (e < 0) throw InvalidMorphism(2, "all polynomials are zero");
  if (e == 0) throw InvalidMorphism(1, "e = 0 gives a constant map; only non-constant morphisms are supported");
  MorphismSpec spec;
  spec.name = std::move(name);
  spec.source = std::move(w);
  spec.target = std::move(u);
  spec.polys = std::move(polys);
  spec.e = e;
  return spec;
}

CommonZeroVerdict validate_no_common_zero(const MorphismSpec& spec) {
  if (spec.dim() != 2) throw std::invalid_argument("common-zero validation implemented for m=2 only");
  CommonZeroVerdict v;
  const char* names[2] = {"f_i(1,t)", "f_i(s,1)"};
  const char* vars[2] = {"t", "s"};
  for (std::size_t fixed = 0; fixed < 2; ++fixed) {
    QPoly g = gcd(spec.polys[0].dehomogenize(fixed), spec.polys[1].dehomogenize(fixed));
    if (g.zero() || g.degree() > 0) {
      std::string gs;
      if (g.zero()) {
        gs = "0";
      } else {
        for (int k = g.degree(); k >= 0; --k) {
          const Rational& c = g.coeffs()[k];
          if (sgn(c) == 0) continue;
          if (!gs.empty()) gs += sgn(c) < 0 ? " - " : " + ";
          else if (sgn(c) < 0) gs += "-";
          Rational a = abs(c);
          std::string mono = k == 0 ? "" : (k == 1 ? std::string(vars[fixed]) : std::string(vars[fixed]) + "^" + std::to_string(k));
          if (mono.empty()) gs += a.get_str();
          else if (a == 1) gs += mono;
          else gs += a.get_str() + "*" + mono;
        }
      }
      v.witness = std::string("gcd of ") + names[fixed] + " is " + gs +
                  (fixed == 0 ? " (common zero with x1 != 0)" : " (common zero with x2 != 0)");
      return v;
    }
  }
  v.pass = true;
  return v;
}

namespace {

MorphismSpec from_json(const std::string& text, bool check) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("config: missing field \"") + key + "\"");
    return j.at(key);
  };
  auto weights = [&](const char* key) {
    const auto& a = need(key);
    if (!a.is_array()) throw ParseError(std::string("config: \"") + key + "\" must be an array of integers");
    std::vector<int> w;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number_integer())
        throw ParseError(std::string("config: \"") + key + "\"[" + std::to_string(i) + "] is not an integer");
      w.push_back(a[i].get<int>());
    }
    try {
      return WeightVector(w);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("config: \"") + key + "\": " + e.what());
    }
  };
  std::string name = j.is_object() && j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  WeightVector w = weights("source_weights");
  WeightVector u = weights("target_weights");
  const auto& ps = need("polynomials");
  if (!ps.is_array()) throw ParseError("config: \"polynomials\" must be an array of strings");
  std::vector<WeightedPolynomial> polys;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i].is_string()) throw ParseError("config: \"polynomials\"[" + std::to_string(i) + "] is not a string");
    try {
      polys.push_back(parse_polynomial(ps[i].get<std::string>(), w));
    } catch (const ParseError& e) {
      throw ParseError("config: \"polynomials\"[" + std::to_string(i) + "]: " + e.what());
    }
  }
  MorphismSpec spec = make_morphism(name, w, u, std::move(polys));
  if (check) {
    auto v = validate_no_common_zero(spec);
    if (!v.pass) throw InvalidMorphism(2, "common zero off the origin: " + v.witness);
  }
  return spec;
}

}  // namespace

MorphismSpec parse_morphism(const std::string& json_text) { return from_json(json_text, true); }
MorphismSpec parse_morphism_unchecked(const std::string& json_text) { return from_json(json_text, false); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MorphismSpec load_morphism(const std::string& path) { return parse_morphism(read_file(path)); }

WeightedPoint evaluate(const MorphismSpec& spec, const WeightedPoint& x) {
  if (!(x.weights() == spec.source)) throw std::invalid_argument("evaluate: point is not in the source space");
  std::vector<Rational> y;
  for (const auto& f : spec.polys) y.push_back(f(x.coords()));
  bool all_zero = true;
  for (const auto& q : y) all_zero = all_zero && sgn(q) == 0;
  if (all_zero) throw std::logic_error("evaluate: morphism vanished at a nonzero point; validation is inconsistent");
  return WeightedPoint(std::move(y), spec.target);
}

MorphismSpec rescale_representative(const MorphismSpec& spec, const Rational& c) {
  std::vector<WeightedPolynomial> polys;
  for (std::size_t i = 0; i < spec.polys.size(); ++i) {
    Rational s = 1;
    for (int k = 0; k < spec.target[i]; ++k) s *= c;
    std::map<Exponents, Rational> t;
    for (const auto& [k, a] : spec.polys[i].terms()) t[k] = a * s;
    polys.emplace_back(std::move(t), spec.source);
  }
  return make_morphism(spec.name, spec.source, spec.target, std::move(polys));
}

}  // namespace wpc
