#pragma once

#include "iif/rational.hpp"

#include <atomic>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace iif {

// Soft cap on total degree; guards against runaway symbolic blow-up.
inline std::atomic<int>& max_degree_limit() {
  static std::atomic<int> limit{64};
  return limit;
}

struct Mono {
  int i = 0, j = 0;  // x^i * y^j
  friend bool operator==(const Mono& a, const Mono& b) { return a.i == b.i && a.j == b.j; }
};

// Graded lexicographic, x before y: compare by total degree, then by x-exponent.
struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const {
    int da = a.i + a.j, db = b.i + b.j;
    if (da != db) return da < db;
    return a.i < b.i;
  }
};

template <class R>
class BiPoly {
 public:
  using Terms = std::map<Mono, R, MonoLess>;
  Terms terms;

  BiPoly() = default;

  static BiPoly zero() { return BiPoly(); }
  static BiPoly constant(const R& c) {
    BiPoly p;
    p.set(0, 0, c);
    return p;
  }
  static BiPoly var_x() { return monomial(1, 0, R(1)); }
  static BiPoly var_y() { return monomial(0, 1, R(1)); }
  static BiPoly monomial(int i, int j, const R& c) {
    BiPoly p;
    p.set(i, j, c);
    return p;
  }

  void set(int i, int j, const R& c) {
    if (i < 0 || j < 0) throw std::invalid_argument("negative exponent");
    if (i + j > max_degree_limit().load()) throw std::runtime_error("degree limit exceeded");
    if (is_zero(c))
      terms.erase(Mono{i, j});
    else
      terms[Mono{i, j}] = c;
  }
  void add_term(int i, int j, const R& c) {
    if (is_zero(c)) return;
    Mono m{i, j};
    auto it = terms.find(m);
    if (it == terms.end()) {
      set(i, j, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) terms.erase(it);
    }
  }
  R coeff(int i, int j) const {
    auto it = terms.find(Mono{i, j});
    return it == terms.end() ? R(0) : it->second;
  }

  bool is_zero_poly() const { return terms.empty(); }
  int degree() const {  // degree of the zero polynomial reported as -1
    if (terms.empty()) return -1;
    auto it = terms.rbegin();
    return it->first.i + it->first.j;
  }
  std::pair<Mono, R> leading_term() const {
    if (terms.empty()) throw std::logic_error("leading term of zero polynomial");
    auto it = terms.rbegin();
    return {it->first, it->second};
  }

  friend BiPoly operator+(const BiPoly& p, const BiPoly& q) {
    BiPoly r = p;
    for (const auto& [m, c] : q.terms) r.add_term(m.i, m.j, c);
    return r;
  }
  friend BiPoly operator-(const BiPoly& p, const BiPoly& q) {
    BiPoly r = p;
    for (const auto& [m, c] : q.terms) r.add_term(m.i, m.j, R(0) - c);
    return r;
  }
  friend BiPoly operator-(const BiPoly& p) { return BiPoly() - p; }
  friend BiPoly operator*(const BiPoly& p, const BiPoly& q) {
    BiPoly r;
    for (const auto& [mp, cp] : p.terms)
      for (const auto& [mq, cq] : q.terms) r.add_term(mp.i + mq.i, mp.j + mq.j, cp * cq);
    return r;
  }
  BiPoly& operator+=(const BiPoly& q) { return *this = *this + q; }
  BiPoly& operator-=(const BiPoly& q) { return *this = *this - q; }
  BiPoly& operator*=(const BiPoly& q) { return *this = *this * q; }
  friend bool operator==(const BiPoly& p, const BiPoly& q) { return p.terms == q.terms; }
  friend bool operator!=(const BiPoly& p, const BiPoly& q) { return !(p == q); }

  BiPoly scaled(const R& c) const {
    BiPoly r;
    if (is_zero(c)) return r;
    for (const auto& [m, t] : terms) r.set(m.i, m.j, t * c);
    return r;
  }
  BiPoly pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative polynomial power");
    BiPoly acc = constant(R(1));
    for (int k = 0; k < e; ++k) acc = acc * (*this);
    return acc;
  }
  BiPoly dx() const {
    BiPoly r;
    for (const auto& [m, c] : terms)
      if (m.i > 0) r.set(m.i - 1, m.j, c * R(m.i));
    return r;
  }
  BiPoly dy() const {
    BiPoly r;
    for (const auto& [m, c] : terms)
      if (m.j > 0) r.set(m.i, m.j - 1, c * R(m.j));
    return r;
  }
  // Drops every term of total degree > d (series truncation).
  BiPoly truncated(int d) const {
    BiPoly r;
    for (const auto& [m, c] : terms)
      if (m.i + m.j <= d) r.set(m.i, m.j, c);
    return r;
  }
  // Homogeneous part of total degree d.
  BiPoly homogeneous_part(int d) const {
    BiPoly r;
    for (const auto& [m, c] : terms)
      if (m.i + m.j == d) r.set(m.i, m.j, c);
    return r;
  }

  // Horner evaluation over any ring S; conv maps coefficients R -> S.
  // Requires a nonzero polynomial (callers handle the zero case).
  template <class S, class Conv>
  S eval_gen(const S& xv, const S& yv, Conv conv) const {
    // Group terms by y-exponent: p = sum_j c_j(x) y^j; evaluate each c_j by
    // Horner over x-exponent gaps, then Horner in y over y-exponent gaps.
    std::map<int, std::map<int, const R*>> by_j;
    for (const auto& [m, c] : terms) by_j[m.j][m.i] = &c;
    auto pow_s = [](const S& base, int e) {  // e >= 1
      S acc = base;
      for (int k = 1; k < e; ++k) acc = acc * base;
      return acc;
    };
    auto eval_cj = [&](const std::map<int, const R*>& row) {
      auto it = row.rbegin();
      S cj = conv(*it->second);
      int prev_i = it->first;
      for (++it; it != row.rend(); ++it) {
        cj = cj * pow_s(xv, prev_i - it->first) + conv(*it->second);
        prev_i = it->first;
      }
      if (prev_i > 0) cj = cj * pow_s(xv, prev_i);
      return cj;
    };
    auto itj = by_j.rbegin();
    S result = eval_cj(itj->second);
    int prev_j = itj->first;
    for (++itj; itj != by_j.rend(); ++itj) {
      result = result * pow_s(yv, prev_j - itj->first) + eval_cj(itj->second);
      prev_j = itj->first;
    }
    if (prev_j > 0) result = result * pow_s(yv, prev_j);
    return result;
  }

  R eval(const R& xv, const R& yv) const {
    if (terms.empty()) return R(0);
    return eval_gen<R>(xv, yv, [](const R& c) { return c; });
  }
  double eval_d(double xv, double yv) const {
    if (terms.empty()) return 0.0;
    return eval_gen<double>(xv, yv, [](const R& c) { return to_double(c); });
  }
};

// Single-divisor multivariate division in graded-lex order.
// dividend = quotient * divisor + remainder; no remainder term is divisible
// by the divisor's leading monomial. Exactness (remainder == 0) does not
// depend on the monomial order.
template <class R>
std::pair<BiPoly<R>, BiPoly<R>> poly_divide(const BiPoly<R>& dividend, const BiPoly<R>& divisor) {
  if (divisor.is_zero_poly()) throw std::invalid_argument("division by zero polynomial");
  BiPoly<R> quotient, remainder;
  BiPoly<R> rest = dividend;
  auto [lm, lc] = divisor.leading_term();
  while (!rest.is_zero_poly()) {
    auto [rm, rc] = rest.leading_term();
    if (rm.i >= lm.i && rm.j >= lm.j) {
      R q = rc / lc;
      int di = rm.i - lm.i, dj = rm.j - lm.j;
      quotient.add_term(di, dj, q);
      rest = rest - divisor * BiPoly<R>::monomial(di, dj, q);
    } else {
      remainder.add_term(rm.i, rm.j, rc);
      rest.terms.erase(rm);
    }
  }
  return {quotient, remainder};
}

template <class R>
std::optional<BiPoly<R>> divide_exact(const BiPoly<R>& dividend, const BiPoly<R>& divisor) {
  auto [q, r] = poly_divide(dividend, divisor);
  if (!r.is_zero_poly()) return std::nullopt;
  return q;
}

// Largest m with f^m dividing v exactly (v != 0, f nonconstant).
template <class R>
int multiplicity_of_factor(const BiPoly<R>& v, const BiPoly<R>& f) {
  if (f.is_zero_poly()) throw std::invalid_argument("division by zero polynomial");
  if (f.degree() == 0) throw std::invalid_argument("constant factor has no multiplicity");
  int m = 0;
  BiPoly<R> cur = v;
  while (!cur.is_zero_poly()) {
    auto q = divide_exact(cur, f);
    if (!q) break;
    cur = *q;
    ++m;
  }
  return m;
}

template <class R>
std::string poly_to_string(const BiPoly<R>& p, const std::string& xn = "x", const std::string& yn = "y") {
  if (p.is_zero_poly()) return "0";
  std::ostringstream os;
  bool first = true;
  // print highest degree first for readability
  for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
    const auto& [m, c] = *it;
    std::string cs = to_string(c);
    bool neg = !cs.empty() && cs[0] == '-';
    if (first) {
      if (neg) os << "-", cs = cs.substr(1);
    } else {
      os << (neg ? " - " : " + ");
      if (neg) cs = cs.substr(1);
    }
    first = false;
    bool has_var = m.i > 0 || m.j > 0;
    bool unit = (cs == "1");
    if (!unit || !has_var) os << cs;
    if (!unit && has_var) os << "*";
    if (m.i > 0) {
      os << xn;
      if (m.i > 1) os << "^" << m.i;
      if (m.j > 0) os << "*";
    }
    if (m.j > 0) {
      os << yn;
      if (m.j > 1) os << "^" << m.j;
    }
  }
  return os.str();
}

using RPoly = BiPoly<Rational>;

}  // namespace iif
