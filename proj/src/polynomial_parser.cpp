#include <cctype>

#include "wpc/morphism.hpp"

namespace wpc {

namespace {

using Terms = std::map<Exponents, Rational>;

void add_into(Terms& acc, const Exponents& k, const Rational& c) {
  Rational& slot = acc[k];
  slot += c;
  if (sgn(slot) == 0) acc.erase(k);
}

Terms add(const Terms& a, const Terms& b, int sign) {
  Terms r = a;
  for (const auto& [k, c] : b) add_into(r, k, sign > 0 ? c : Rational(-c));
  return r;
}

Terms mul(const Terms& a, const Terms& b) {
  Terms r;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      Exponents k(ka.size());
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
      add_into(r, k, ca * cb);
    }
  return r;
}

class Parser {
 public:
  Parser(const std::string& s, std::size_t m) : s_(s), m_(m) {}

  Terms parse() {
    Terms t = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial \"" + s_ + "\", column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Terms constant(const Rational& c) const {
    Terms t;
    if (sgn(c) != 0) t[Exponents(m_, 0)] = c;
    return t;
  }

  Terms expr() {
    skip();
    Terms acc;
    int sign = 1;
    if (eat('-'))
      sign = -1;
    else
      eat('+');
    acc = add(acc, term(), sign);
    for (;;) {
      if (eat('+'))
        acc = add(acc, term(), 1);
      else if (eat('-'))
        acc = add(acc, term(), -1);
      else
        return acc;
    }
  }

  Terms term() {
    Terms acc = power();
    for (;;) {
      if (eat('*')) {
        acc = mul(acc, power());
      } else if (eat('/')) {
        std::size_t at = pos_;
        Terms d = power();
        if (d.size() != 1 || d.begin()->first != Exponents(m_, 0)) {
          pos_ = at;
          fail("division is only allowed by a nonzero constant");
        }
        acc = mul(acc, constant(1 / d.begin()->second));
      } else {
        skip();
        // Implicit product such as "3x1" or "2(x1+x2)".
        if (pos_ < s_.size() && (s_[pos_] == 'x' || s_[pos_] == '('))
          acc = mul(acc, power());
        else
          return acc;
      }
    }
  }

  Terms power() {
    Terms base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer exponent");
      long k = std::stol(s_.substr(start, pos_ - start));
      if (k > 64) fail("exponent too large");
      Terms r = constant(1);
      for (long i = 0; i < k; ++i) r = mul(r, base);
      return r;
    }
    return base;
  }

  Terms atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Terms t = expr();
      if (!eat(')')) fail("expected ')'");
      return t;
    }
    if (c == '-') {
      ++pos_;
      return add(Terms{}, power(), -1);
    }
    if (c == 'x') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index after 'x'");
      std::size_t idx = std::stoul(s_.substr(start, pos_ - start));
      if (idx < 1 || idx > m_) {
        pos_ = start;
        fail("variable x" + std::to_string(idx) + " out of range x1..x" + std::to_string(m_));
      }
      Exponents k(m_, 0);
      k[idx - 1] = 1;
      return Terms{{k, Rational(1)}};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      Rational q;
      try {
        q = parse_rational(s_.substr(start, pos_ - start));
      } catch (const std::invalid_argument&) {
        pos_ = start;
        fail("malformed number");
      }
      return constant(q);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t m_;
  std::size_t pos_ = 0;
};

}  // namespace

WeightedPolynomial parse_polynomial(const std::string& text, const WeightVector& w) {
  Parser p(text, w.size());
  Terms t = p.parse();
  try {
    return WeightedPolynomial(std::move(t), w);
  } catch (const InvalidMorphism& e) {
    throw InvalidMorphism(1, "polynomial \"" + text + "\": " + e.what());
  }
}

}  // namespace wpc
