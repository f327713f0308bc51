#pragma once

#include "iif/bipoly.hpp"
#include "iif/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace iif {

// Sparse polynomial in named parameters with exact rational coefficients.
// Used as the coefficient ring of BiPoly when a system carries symbolic
// parameters; only ring operations are ever required.
class ParamPoly {
 public:
  using PMono = std::map<std::string, int>;
  std::map<PMono, Rational> terms;

  ParamPoly() = default;
  ParamPoly(int n) { add(PMono{}, Rational(n)); }
  ParamPoly(const Rational& r) { add(PMono{}, r); }

  static ParamPoly var(const std::string& name) {
    ParamPoly p;
    p.add(PMono{{name, 1}}, Rational(1));
    return p;
  }

  void add(const PMono& m, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  bool zero() const { return terms.empty(); }

  friend ParamPoly operator+(const ParamPoly& p, const ParamPoly& q) {
    ParamPoly r = p;
    for (const auto& [m, c] : q.terms) r.add(m, c);
    return r;
  }
  friend ParamPoly operator-(const ParamPoly& p, const ParamPoly& q) {
    ParamPoly r = p;
    for (const auto& [m, c] : q.terms) r.add(m, -c);
    return r;
  }
  friend ParamPoly operator-(const ParamPoly& p) { return ParamPoly() - p; }
  friend ParamPoly operator*(const ParamPoly& p, const ParamPoly& q) {
    ParamPoly r;
    for (const auto& [mp, cp] : p.terms)
      for (const auto& [mq, cq] : q.terms) {
        PMono m = mp;
        for (const auto& [name, e] : mq) m[name] += e;
        r.add(m, cp * cq);
      }
    return r;
  }
  ParamPoly& operator+=(const ParamPoly& q) { return *this = *this + q; }
  ParamPoly& operator-=(const ParamPoly& q) { return *this = *this - q; }
  ParamPoly& operator*=(const ParamPoly& q) { return *this = *this * q; }
  friend bool operator==(const ParamPoly& p, const ParamPoly& q) { return p.terms == q.terms; }
  friend bool operator!=(const ParamPoly& p, const ParamPoly& q) { return !(p == q); }

  Rational eval(const std::map<std::string, Rational>& binding) const {
    Rational total = 0;
    for (const auto& [m, c] : terms) {
      Rational t = c;
      for (const auto& [name, e] : m) {
        auto it = binding.find(name);
        if (it == binding.end()) throw std::invalid_argument("unbound parameter: " + name);
        t *= rational_pow(it->second, e);
      }
      total += t;
    }
    return total;
  }

  // True when the polynomial is a plain rational constant.
  bool constant_value(Rational& out) const {
    if (terms.empty()) {
      out = 0;
      return true;
    }
    if (terms.size() == 1 && terms.begin()->first.empty()) {
      out = terms.begin()->second;
      return true;
    }
    return false;
  }
};

inline bool is_zero(const ParamPoly& p) { return p.zero(); }

inline std::string to_string(const ParamPoly& p) {
  if (p.zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms) {
    std::string cs = to_string(c);
    bool neg = !cs.empty() && cs[0] == '-';
    if (neg) cs = cs.substr(1);
    s += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    bool unit = (cs == "1") && !m.empty();
    if (!unit) s += cs;
    bool need_star = !unit;
    for (const auto& [name, e] : m) {
      if (need_star) s += "*";
      s += name;
      if (e > 1) s += "^" + std::to_string(e);
      need_star = true;
    }
  }
  return s;
}

using PPoly = BiPoly<ParamPoly>;

// Collapse a parametric bivariate polynomial to rational coefficients under a
// parameter binding.
inline RPoly bind_params(const PPoly& p, const std::map<std::string, Rational>& binding) {
  RPoly out;
  for (const auto& [m, c] : p.terms) out.add_term(m.i, m.j, c.eval(binding));
  return out;
}

// Recursive-descent parser for polynomial expressions in x, y and named
// parameters: +, -, *, ^ (nonnegative integer), parentheses, and rational or
// decimal literals. Grammar deliberately requires explicit '*'.
class PolyExprParser {
 public:
  explicit PolyExprParser(std::string text) : s_(std::move(text)) {}

  PPoly parse() {
    PPoly r = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return r;
  }

 private:
  std::string s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument("parse error at offset " + std::to_string(pos_) + ": " + why +
                                " in \"" + s_ + "\"");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  PPoly expr() {
    PPoly acc = eat('-') ? PPoly::zero() - term() : (eat('+'), term());
    while (true) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }
  PPoly term() {
    PPoly acc = factor();
    while (eat('*')) acc *= factor();
    return acc;
  }
  PPoly factor() {
    PPoly base = atom();
    if (eat('^')) {
      skip_ws();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected integer exponent");
      int e = std::stoi(s_.substr(start, pos_ - start));
      PPoly acc = PPoly::constant(ParamPoly(1));
      for (int k = 0; k < e; ++k) acc *= base;
      return acc;
    }
    return base;
  }
  PPoly atom() {
    skip_ws();
    if (eat('(')) {
      PPoly inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      // rational literal a/b: only when the '/' is directly between digit runs
      if (pos_ < s_.size() && s_[pos_] == '/') {
        size_t save = pos_;
        ++pos_;
        size_t dstart = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == dstart) pos_ = save;
      }
      return PPoly::constant(ParamPoly(parse_rational(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return PPoly::var_x();
      if (name == "y") return PPoly::var_y();
      return PPoly::constant(ParamPoly::var(name));
    }
    fail("unexpected character");
  }
};

inline PPoly parse_poly_expr(const std::string& text) { return PolyExprParser(text).parse(); }

// Convenience: parse an expression that must not contain free parameters.
inline RPoly parse_rpoly(const std::string& text) {
  PPoly p = parse_poly_expr(text);
  RPoly out;
  for (const auto& [m, c] : p.terms) {
    Rational v;
    if (!c.constant_value(v)) throw std::invalid_argument("unexpected parameter in: " + text);
    out.add_term(m.i, m.j, v);
  }
  return out;
}

}  // namespace iif
