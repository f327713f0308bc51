#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace iif {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_zero(const Rational& r) { return r.is_zero(); }

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline int sign_of(const Rational& r) { return r.sign(); }

// Accepts "a", "a/b" and plain decimal literals like "-0.25" (converted exactly).
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    try {
      return Rational(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad rational literal: " + s);
    }
  }
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
  if (head.empty()) head = "0";
  for (char c : head + tail)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad rational literal: " + s);
  BigInt num = BigInt(head + tail);
  BigInt den = 1;
  for (size_t k = 0; k < tail.size(); ++k) den *= 10;
  Rational r(num, den);
  return neg ? -r : r;
}

inline std::string to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational rational_pow(const Rational& r, int e) {
  if (e < 0) {
    if (is_zero(r)) throw std::domain_error("zero to negative power");
    return 1 / rational_pow(r, -e);
  }
  Rational acc = 1, base = r;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

// True iff r is the square of a rational; root receives the nonnegative root.
inline bool rational_sqrt_exact(const Rational& r, Rational& root) {
  if (r < 0) return false;
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  BigInt sn = boost::multiprecision::sqrt(num);
  BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return false;
  root = Rational(sn, sd);
  return true;
}

// Element of the real quadratic field Q(sqrt(d)): value = a + b*sqrt(d).
// d is a positive non-square rational (d == 0 marks a pure rational value).
struct QuadExt {
  Rational a, b, d;

  QuadExt() : a(0), b(0), d(0) {}
  QuadExt(int n) : a(n), b(0), d(0) {}
  QuadExt(const Rational& r) : a(r), b(0), d(0) {}
  QuadExt(Rational a_, Rational b_, Rational d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {
    normalize();
  }

  static QuadExt sqrt_of(const Rational& d) {
    if (d < 0) throw std::domain_error("negative radicand");
    Rational root;
    if (rational_sqrt_exact(d, root)) return QuadExt(root);
    return QuadExt(Rational(0), Rational(1), d);
  }

  void normalize() {
    if (b.is_zero()) {
      d = 0;
      return;
    }
    Rational root;
    if (rational_sqrt_exact(d, root)) {  // degenerate: sqrt(d) rational after all
      a += b * root;
      b = 0;
      d = 0;
    }
  }

  bool is_rational() const { return b.is_zero(); }

  static Rational merged_d(const QuadExt& x, const QuadExt& y) {
    if (x.b.is_zero()) return y.d;
    if (y.b.is_zero()) return x.d;
    if (x.d != y.d) throw std::domain_error("mixed quadratic fields");
    return x.d;
  }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a + y.a, x.b + y.b, merged_d(x, y));
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a - y.a, x.b - y.b, merged_d(x, y));
  }
  friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a, -x.b, x.d); }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    Rational d = merged_d(x, y);
    return QuadExt(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
  }
  QuadExt inverse() const {
    Rational norm = a * a - b * b * d;
    if (norm.is_zero()) throw std::domain_error("division by zero in quadratic field");
    return QuadExt(a / norm, -b / norm, d);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inverse(); }
  QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
  QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
  QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
  QuadExt& operator/=(const QuadExt& y) { return *this = *this / y; }
  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.a == y.a && x.b == y.b && (x.b.is_zero() || x.d == y.d);
  }
  friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
};

inline bool is_zero(const QuadExt& q) { return q.a.is_zero() && q.b.is_zero(); }

inline double to_double(const QuadExt& q) {
  double v = to_double(q.a);
  if (!q.b.is_zero()) v += to_double(q.b) * std::sqrt(to_double(q.d));
  return v;
}

// Exact sign of a + b*sqrt(d).
inline int sign_of(const QuadExt& q) {
  int sa = q.a.sign(), sb = q.b.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare |a| against |b|*sqrt(d), i.e. a^2 against b^2 d.
  Rational lhs = q.a * q.a, rhs = q.b * q.b * q.d;
  if (lhs == rhs) return 0;
  return (lhs > rhs) ? sa : sb;
}

inline std::string to_string(const QuadExt& q) {
  if (q.b.is_zero()) return to_string(q.a);
  std::string s = to_string(q.a);
  s += (q.b.sign() < 0 ? " - " : " + ");
  Rational ab = boost::multiprecision::abs(q.b);
  if (ab != 1) s += to_string(ab) + "*";
  s += "sqrt(" + to_string(q.d) + ")";
  return s;
}

}  // namespace iif
