#pragma once

#include "iif/bipoly.hpp"

#include <array>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace iif {

// Degree-truncated product: drops every monomial of total degree > cap.
template <class K>
BiPoly<K> mul_trunc(const BiPoly<K>& a, const BiPoly<K>& b, int cap) {
  BiPoly<K> r;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      if (ma.i + ma.j + mb.i + mb.j > cap) continue;
      r.add_term(ma.i + mb.i, ma.j + mb.j, ca * cb);
    }
  return r;
}

// Planar polynomial field written in eigencoordinates of a hyperbolic
// singular point at the origin: linear part diag(l1, l2).
template <class K>
struct EigenField {
  BiPoly<K> f, g;  // dX/dt, dY/dt
  K l1, l2;
};

template <class K>
struct NormalFormStep {
  int degree = 0;
  int removed = 0;
  std::vector<std::pair<Mono, K>> retained_f, retained_g;
};

// Poincare-Dulac reduction through total degree `degree`: every non-resonant
// monomial (divisor i*l1 + j*l2 - l_component != 0) is removed by a
// near-identity change of coordinates; resonant coefficients are retained
// unchanged by later steps.
template <class K>
struct NormalFormResult {
  BiPoly<K> f, g;  // reduced field, linear part included
  K l1, l2;
  std::vector<NormalFormStep<K>> steps;
  std::string report() const;
};

namespace nfdetail {

// Substitutes X -> X + h1, Y -> Y + h2 into w, truncating at degree cap.
template <class K>
BiPoly<K> compose_shift(const BiPoly<K>& w, const BiPoly<K>& xh, const BiPoly<K>& yh, int cap) {
  int max_i = 0, max_j = 0;
  for (const auto& [m, c] : w.terms) {
    max_i = std::max(max_i, m.i);
    max_j = std::max(max_j, m.j);
  }
  std::vector<BiPoly<K>> px(max_i + 1), py(max_j + 1);
  px[0] = BiPoly<K>::constant(K(1));
  py[0] = BiPoly<K>::constant(K(1));
  for (int i = 1; i <= max_i; ++i) px[i] = mul_trunc(px[i - 1], xh, cap);
  for (int j = 1; j <= max_j; ++j) py[j] = mul_trunc(py[j - 1], yh, cap);
  BiPoly<K> r;
  for (const auto& [m, c] : w.terms) {
    BiPoly<K> term = mul_trunc(px[m.i], py[m.j], cap);
    r = r + term.scaled(c);
  }
  return r;
}

}  // namespace nfdetail

template <class K>
NormalFormResult<K> poincare_dulac(const EigenField<K>& field, int degree) {
  if (degree < 1) throw std::invalid_argument("degree must be at least 1");
  const int cap = degree;
  BiPoly<K> f = field.f.truncated(cap), g = field.g.truncated(cap);
  NormalFormResult<K> res;
  res.l1 = field.l1;
  res.l2 = field.l2;
  for (int d = 2; d <= cap; ++d) {
    BiPoly<K> fd = f.homogeneous_part(d), gd = g.homogeneous_part(d);
    BiPoly<K> h1, h2;
    NormalFormStep<K> step;
    step.degree = d;
    for (const auto& [m, c] : fd.terms) {
      K div = K(m.i) * field.l1 + K(m.j) * field.l2 - field.l1;
      if (is_zero(div)) {
        step.retained_f.push_back({m, c});
      } else {
        h1.add_term(m.i, m.j, c / div);
        ++step.removed;
      }
    }
    for (const auto& [m, c] : gd.terms) {
      K div = K(m.i) * field.l1 + K(m.j) * field.l2 - field.l2;
      if (is_zero(div)) {
        step.retained_g.push_back({m, c});
      } else {
        h2.add_term(m.i, m.j, c / div);
        ++step.removed;
      }
    }
    res.steps.push_back(step);
    if (h1.is_zero_poly() && h2.is_zero_poly()) continue;
    // w = F(id + h), truncated
    BiPoly<K> xh = BiPoly<K>::var_x() + h1, yh = BiPoly<K>::var_y() + h2;
    BiPoly<K> w1 = nfdetail::compose_shift(f, xh, yh, cap);
    BiPoly<K> w2 = nfdetail::compose_shift(g, xh, yh, cap);
    // (I + Dh)^{-1} w via the Neumann series sum_k (-Dh)^k w; Dh has minimum
    // degree d-1 >= 1, so the series terminates within the truncation.
    BiPoly<K> a11 = h1.dx(), a12 = h1.dy(), a21 = h2.dx(), a22 = h2.dy();
    BiPoly<K> r1 = w1, r2 = w2, t1 = w1, t2 = w2;
    for (int k = 1; k * (d - 1) <= cap; ++k) {
      BiPoly<K> n1 = BiPoly<K>() - (mul_trunc(a11, t1, cap) + mul_trunc(a12, t2, cap));
      BiPoly<K> n2 = BiPoly<K>() - (mul_trunc(a21, t1, cap) + mul_trunc(a22, t2, cap));
      t1 = n1;
      t2 = n2;
      if (t1.is_zero_poly() && t2.is_zero_poly()) break;
      r1 = r1 + t1;
      r2 = r2 + t2;
    }
    f = r1.truncated(cap);
    g = r2.truncated(cap);
  }
  res.f = f;
  res.g = g;
  return res;
}

template <class K>
std::string NormalFormResult<K>::report() const {
  std::ostringstream os;
  os << "normal form reduction (eigenvalues " << to_string(l1) << ", " << to_string(l2) << ")\n";
  for (const auto& st : steps) {
    os << "degree " << st.degree << ": removed " << st.removed << " monomial(s)";
    if (st.retained_f.empty() && st.retained_g.empty()) {
      os << ", none retained\n";
      continue;
    }
    os << ", retained";
    for (const auto& [m, c] : st.retained_f)
      os << " dX: x^" << m.i << " y^" << m.j << " * (" << to_string(c) << ")";
    for (const auto& [m, c] : st.retained_g)
      os << " dY: x^" << m.i << " y^" << m.j << " * (" << to_string(c) << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace iif
