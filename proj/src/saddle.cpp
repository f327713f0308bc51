#include "iif/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iif {
namespace {

int to_int_checked(const BigInt& n) {
  if (n > 1000000 || n < -1000000) throw std::runtime_error("integer out of range");
  return static_cast<int>(n);
}

// Shifts a rational polynomial to local coordinates at (x0, y0).
RPoly shift_poly(const RPoly& p, const Rational& x0, const Rational& y0) {
  if (p.is_zero_poly()) return p;
  RPoly X = RPoly::var_x() + RPoly::constant(x0);
  RPoly Y = RPoly::var_y() + RPoly::constant(y0);
  return p.eval_gen<RPoly>(X, Y, [](const Rational& c) { return RPoly::constant(c); });
}

template <class K>
BiPoly<K> convert_poly(const RPoly& p) {
  BiPoly<K> r;
  for (const auto& [m, c] : p.terms) r.add_term(m.i, m.j, K(c));
  return r;
}

// Left eigenvector row for eigenvalue l of the rational 2x2 matrix A.
template <class K>
std::array<K, 2> left_row(const std::array<Rational, 4>& A, const K& l) {
  const Rational &a = A[0], &b = A[1], &c = A[2], &d = A[3];
  if (!is_zero(c)) return {K(c), l - K(a)};
  if (!is_zero(b)) return {l - K(d), K(b)};
  return l == K(a) ? std::array<K, 2>{K(1), K(0)} : std::array<K, 2>{K(0), K(1)};
}

// Normalization convention fixing the scale of the eigencoordinates (saddle
// quantities depend on it only through a positive common factor, and all
// stored reference values use this convention): rational rows reduce to
// primitive integers with the last nonzero entry positive; quadratic-field
// rows divide by their last nonzero entry.
void normalize_row(std::array<Rational, 2>& row) {
  BigInt n0 = boost::multiprecision::numerator(row[0]);
  BigInt d0 = boost::multiprecision::denominator(row[0]);
  BigInt n1 = boost::multiprecision::numerator(row[1]);
  BigInt d1 = boost::multiprecision::denominator(row[1]);
  BigInt l = d0 / boost::multiprecision::gcd(d0, d1) * d1;
  BigInt i0 = n0 * (l / d0), i1 = n1 * (l / d1);
  BigInt g = boost::multiprecision::gcd(boost::multiprecision::abs(i0),
                                        boost::multiprecision::abs(i1));
  if (g != 0) {
    i0 /= g;
    i1 /= g;
  }
  BigInt last = (i1 != 0) ? i1 : i0;
  if (last < 0) {
    i0 = -i0;
    i1 = -i1;
  }
  row[0] = Rational(i0);
  row[1] = Rational(i1);
}

void normalize_row(std::array<QuadExt, 2>& row) {
  const QuadExt& last = is_zero(row[1]) ? row[0] : row[1];
  QuadExt inv = QuadExt(1) / last;
  row[0] = row[0] * inv;
  row[1] = row[1] * inv;
}

// Field at the saddle rewritten in left-eigenvector coordinates
// (X, Y)^T = M (x - x0, y - y0)^T, so the linear part becomes diag(l1, l2).
template <class K>
EigenField<K> eigen_field(const PlanarSystem& sys, const Rational& x0, const Rational& y0,
                          const std::array<Rational, 4>& jac, const K& l1, const K& l2) {
  std::array<K, 2> r1 = left_row(jac, l1), r2 = left_row(jac, l2);
  normalize_row(r1);
  normalize_row(r2);
  K det = r1[0] * r2[1] - r1[1] * r2[0];
  if (is_zero(det)) throw std::runtime_error("not a hyperbolic saddle");
  // inverse of M applied to (X, Y)
  BiPoly<K> X = BiPoly<K>::var_x(), Y = BiPoly<K>::var_y();
  BiPoly<K> xpoly = X.scaled(r2[1] / det) + Y.scaled(K(0) - r1[1] / det);
  BiPoly<K> ypoly = X.scaled(K(0) - r2[0] / det) + Y.scaled(r1[0] / det);
  BiPoly<K> ps = convert_poly<K>(shift_poly(sys.p, x0, y0));
  BiPoly<K> qs = convert_poly<K>(shift_poly(sys.q, x0, y0));
  auto conv = [](const K& c) { return BiPoly<K>::constant(c); };
  auto subst = [&](const BiPoly<K>& w) {
    return w.is_zero_poly() ? BiPoly<K>() : w.template eval_gen<BiPoly<K>>(xpoly, ypoly, conv);
  };
  BiPoly<K> pe = subst(ps), qe = subst(qs);
  EigenField<K> ef;
  ef.f = pe.scaled(r1[0]) + qe.scaled(r1[1]);
  ef.g = pe.scaled(r2[0]) + qe.scaled(r2[1]);
  ef.l1 = l1;
  ef.l2 = l2;
  return ef;
}

std::array<double, 2> unit_right_eigenvector(double a, double b, double c, double d, double l) {
  double v1, v2;
  // (A - l) v = 0; choose the better-conditioned row
  double n1 = std::hypot(b, l - a), n2 = std::hypot(l - d, c);
  if (n1 >= n2 && n1 > 0) {
    v1 = b;
    v2 = l - a;
  } else if (n2 > 0) {
    v1 = l - d;
    v2 = c;
  } else {  // diagonal matrix
    if (std::abs(a - l) < std::abs(d - l)) {
      v1 = 1;
      v2 = 0;
    } else {
      v1 = 0;
      v2 = 1;
    }
  }
  double nrm = std::hypot(v1, v2);
  v1 /= nrm;
  v2 /= nrm;
  if ((std::abs(v1) >= std::abs(v2) && v1 < 0) || (std::abs(v2) > std::abs(v1) && v2 < 0)) {
    v1 = -v1;
    v2 = -v2;
  }
  return {v1, v2};
}

}  // namespace

SaddleInfo classify_saddle(const PlanarSystem& sys, const SingularPoint& pt) {
  (void)sys;
  SaddleInfo si;
  si.x = pt.x;
  si.y = pt.y;
  double a = pt.jac[0], b = pt.jac[1], c = pt.jac[2], d = pt.jac[3];
  if (pt.exact && pt.exact_jac) {
    const JacobianInfo& J = *pt.exact_jac;
    if (!(J.det < 0)) throw std::runtime_error("not a hyperbolic saddle");
    si.exact = true;
    si.rx = pt.rx;
    si.ry = pt.ry;
    si.exact_jac = J;
    si.lambda = to_double(J.l1);
    si.mu = to_double(J.l2);
    si.strong = !is_zero(J.trace);
    si.ratio_r = -si.mu / si.lambda;
    if (J.rational_eigenvalues) {
      si.rational_eigenvalues = true;
      si.lambda_exact = J.l1.a;
      si.mu_exact = J.l2.a;
      Rational r = -J.l2.a / J.l1.a;
      int q = to_int_checked(boost::multiprecision::numerator(r));
      int p = to_int_checked(boost::multiprecision::denominator(r));
      si.resonance = std::make_pair(p, q);
    } else if (is_zero(J.trace)) {
      si.resonance = std::make_pair(1, 1);  // eigenvalues +-sqrt(-det), r = 1
    }
  } else {
    double tr = a + d, det = a * d - b * c;
    double disc = tr * tr - 4 * det;
    if (!(det < 0) || !(disc > 0)) throw std::runtime_error("not a hyperbolic saddle");
    si.lambda = (tr + std::sqrt(disc)) / 2;
    si.mu = (tr - std::sqrt(disc)) / 2;
    if (!(si.lambda > 0 && si.mu < 0)) throw std::runtime_error("not a hyperbolic saddle");
    si.strong = std::abs(tr) > 1e-9;
    si.ratio_r = -si.mu / si.lambda;
    // numeric resonance scan, flagged and never used for exact normal forms
    for (int p = 1; p <= 100 && !si.resonance; ++p)
      for (int q = 1; q <= 100; ++q) {
        if (std::gcd(p, q) != 1) continue;
        if (std::abs(si.ratio_r - double(q) / p) < 1e-9) {
          si.resonance = std::make_pair(p, q);
          si.numeric_resonance = true;
          break;
        }
      }
  }
  si.evec_lambda = unit_right_eigenvector(a, b, c, d, si.lambda);
  si.evec_mu = unit_right_eigenvector(a, b, c, d, si.mu);
  return si;
}

Rational SaddleQuantities::alpha(int k) const {
  if (k < 1 || k > static_cast<int>(alphas.size()))
    throw std::out_of_range("saddle quantity index out of range");
  const QuadExt& v = alphas[k - 1];
  if (!v.is_rational()) throw std::runtime_error("saddle quantity is irrational");
  return v.a;
}

namespace {

template <class K>
SaddleQuantities quantities_impl(const PlanarSystem& sys, const SaddleInfo& saddle, int K_count,
                                 const K& lambda) {
  const JacobianInfo& J = *saddle.exact_jac;
  EigenField<K> ef = eigen_field<K>(sys, saddle.rx, saddle.ry, J.m, lambda, K(0) - lambda);
  // time rescale by 1/lambda: eigenvalues become (1, -1)
  K inv = K(1) / lambda;
  ef.f = ef.f.scaled(inv);
  ef.g = ef.g.scaled(inv);
  ef.l1 = K(1);
  ef.l2 = K(-1);
  int degree = 2 * K_count + 1;
  NormalFormResult<K> nf = poincare_dulac(ef, degree);
  SaddleQuantities sq;
  sq.alphas.assign(K_count + 1, QuadExt(0));  // alpha_1 = div X(p0) = 0 (weak)
  for (int k = 1; k <= K_count; ++k) {
    K ak = nf.f.coeff(k + 1, k);
    K bk = K(0) - nf.g.coeff(k, k + 1);
    K al = ak - bk;
    if constexpr (std::is_same_v<K, Rational>)
      sq.alphas[k] = QuadExt(al);
    else
      sq.alphas[k] = al;
  }
  for (size_t i = 0; i < sq.alphas.size(); ++i)
    if (!is_zero(sq.alphas[i])) {
      sq.first_nonzero = static_cast<int>(i) + 1;
      break;
    }
  std::ostringstream os;
  os << "saddle quantities to alpha_" << (K_count + 1) << "\n" << nf.report();
  for (size_t i = 0; i < sq.alphas.size(); ++i)
    os << "alpha_" << (i + 1) << " = " << to_string(sq.alphas[i]) << "\n";
  sq.report = os.str();
  return sq;
}

}  // namespace

SaddleQuantities saddle_quantities(const PlanarSystem& sys, const SaddleInfo& saddle, int K,
                                   int max_k) {
  if (K < 1 || K > max_k) throw std::invalid_argument("K outside configured maximum");
  if (saddle.strong) throw std::runtime_error("strong saddle: quantities undefined beyond alpha_1");
  if (!saddle.exact || !saddle.exact_jac)
    throw std::runtime_error("irrational eigenvalues: exact normal form unsupported");
  const JacobianInfo& J = *saddle.exact_jac;
  if (saddle.rational_eigenvalues) return quantities_impl<Rational>(sys, saddle, K, J.l1.a);
  // weak saddle of a rational system: eigenvalues +-sqrt(-det) in Q(sqrt(d))
  return quantities_impl<QuadExt>(sys, saddle, K, QuadExt::sqrt_of(-J.det));
}

namespace {

template <class K>
ResonantNormalForm resonant_impl(const PlanarSystem& sys, const SaddleInfo& saddle, int degree,
                                 int p, int q, const K& lambda) {
  const JacobianInfo& J = *saddle.exact_jac;
  K mu = K(0) - lambda * K(q) / K(p);
  EigenField<K> ef = eigen_field<K>(sys, saddle.rx, saddle.ry, J.m, lambda, mu);
  // time rescale by p/lambda: eigenvalues become (p, -q)
  K scale = K(p) / lambda;
  ef.f = ef.f.scaled(scale);
  ef.g = ef.g.scaled(scale);
  ef.l1 = K(p);
  ef.l2 = K(-q);
  NormalFormResult<K> nf = poincare_dulac(ef, degree);
  ResonantNormalForm rn;
  rn.p = p;
  rn.q = q;
  rn.truncation_degree = degree;
  rn.k_max = (degree - 1) / (p + q);
  rn.A.assign(rn.k_max, QuadExt(0));
  rn.B.assign(rn.k_max, QuadExt(0));
  rn.c.assign(rn.k_max, QuadExt(0));
  std::vector<K> A(rn.k_max + 1, K(0)), B(rn.k_max + 1, K(0)), C(rn.k_max + 1, K(0));
  for (int k = 1; k <= rn.k_max; ++k) {
    A[k] = nf.f.coeff(1 + k * q, k * p) / K(p);
    B[k] = K(0) - nf.g.coeff(k * q, 1 + k * p) / K(q);
  }
  // C with (1+B)(1+C) = (1+A):  c_k = A_k - B_k - sum_{j<k} B_j c_{k-j}
  for (int k = 1; k <= rn.k_max; ++k) {
    K ck = A[k] - B[k];
    for (int j = 1; j < k; ++j) ck -= B[j] * C[k - j];
    C[k] = ck;
  }
  for (int k = 1; k <= rn.k_max; ++k) {
    rn.A[k - 1] = QuadExt(A[k]);
    rn.B[k - 1] = QuadExt(B[k]);
    rn.c[k - 1] = QuadExt(C[k]);
  }
  for (int k = 1; k <= rn.k_max; ++k)
    if (!is_zero(C[k])) {
      rn.ell = k;
      rn.delta = sign_of(C[k]);
      break;
    }
  if (rn.delta != 0 && 2 * rn.ell <= rn.k_max) {
    rn.a_coeff = QuadExt(C[2 * rn.ell] / (C[rn.ell] * C[rn.ell]));
    rn.a_available = true;
  }
  std::ostringstream os;
  os << "resonant " << p << ":" << q << " orbital normal form, U = X^" << q << " Y^" << p << "\n"
     << nf.report();
  for (int k = 1; k <= rn.k_max; ++k)
    os << "A_" << k << " = " << to_string(rn.A[k - 1]) << ", B_" << k << " = "
       << to_string(rn.B[k - 1]) << ", c_" << k << " = " << to_string(rn.c[k - 1]) << "\n";
  if (rn.delta == 0) {
    os << "formally orbitally linearizable up to degree " << degree << "\n";
  } else {
    os << "obstruction: delta = " << rn.delta << ", ell = " << rn.ell;
    if (rn.a_available) os << ", a = " << to_string(rn.a_coeff);
    os << "\n";
  }
  rn.report = os.str();
  return rn;
}

}  // namespace

ResonantNormalForm resonant_normal_form(const PlanarSystem& sys, const SaddleInfo& saddle,
                                        int degree, int max_degree) {
  if (!saddle.resonance) throw std::runtime_error("nonresonant saddle");
  if (saddle.numeric_resonance || !saddle.exact || !saddle.exact_jac)
    throw std::runtime_error("irrational eigenvalues: exact normal form unsupported");
  if (degree < 2 || degree > max_degree)
    throw std::invalid_argument("degree outside configured maximum");
  auto [p, q] = *saddle.resonance;
  const JacobianInfo& J = *saddle.exact_jac;
  if (saddle.rational_eigenvalues)
    return resonant_impl<Rational>(sys, saddle, degree, p, q, J.l1.a);
  return resonant_impl<QuadExt>(sys, saddle, degree, p, q, QuadExt::sqrt_of(-J.det));
}

namespace {

// Gradient of f at the saddle, exact when possible.
std::array<Rational, 2> exact_gradient(const RPoly& f, const Rational& x0, const Rational& y0) {
  auto ev = [&](const RPoly& g) { return g.is_zero_poly() ? Rational(0) : g.eval(x0, y0); };
  return {ev(f.dx()), ev(f.dy())};
}

}  // namespace

LocalFactorization local_iif_factorization(const PlanarSystem& sys, const IIF& v,
                                           const SaddleInfo& saddle, const RPoly& f_lambda,
                                           const RPoly& f_mu) {
  if (!saddle.exact) throw std::invalid_argument("saddle location must be exact");
  const Rational &x0 = saddle.rx, &y0 = saddle.ry;
  auto check_invariant = [&](const RPoly& f) {
    if (f.is_zero_poly() || !is_zero(f.eval(x0, y0)))
      throw std::runtime_error("separatrix factor mismatch");
    if (!invariant_curve_cofactor(sys, f)) throw std::runtime_error("separatrix factor mismatch");
  };
  check_invariant(f_lambda);
  bool same_curve = (f_lambda == f_mu);
  if (!same_curve) check_invariant(f_mu);

  LocalFactorization out;
  if (same_curve) {
    // both branches inside one curve: gradient vanishes, the quadratic cone
    // must contain both eigendirections
    auto grad = exact_gradient(f_lambda, x0, y0);
    if (!is_zero(grad[0]) || !is_zero(grad[1]))
      throw std::runtime_error("separatrix factor mismatch");
    RPoly sh = shift_poly(f_lambda, x0, y0);
    const RPoly cone = sh.homogeneous_part(2);
    if (cone.is_zero_poly()) throw std::runtime_error("separatrix factor mismatch");
    double cnorm = 0;
    for (const auto& [m, c] : cone.terms) cnorm = std::max(cnorm, std::abs(to_double(c)));
    auto cone_val = [&](const std::array<double, 2>& vdir) {
      return cone.eval_d(vdir[0], vdir[1]);
    };
    if (std::abs(cone_val(saddle.evec_lambda)) > 1e-8 * cnorm ||
        std::abs(cone_val(saddle.evec_mu)) > 1e-8 * cnorm)
      throw std::runtime_error("separatrix factor mismatch");
    int m = multiplicity_of_factor(v.v, f_lambda);
    out.m1 = out.m2 = m;
    if (m > 0) {
      auto u = divide_exact(v.v, f_lambda.pow(m));
      out.unit_nonzero = u && !is_zero(u->eval(x0, y0));
    }
  } else {
    // Distinct curves. f_lambda is the factor with cofactor lambda: it
    // vanishes along the mu-branch, so its gradient is the left
    // lambda-eigenrow, orthogonal to the mu-eigendirection (and parallel to
    // the lambda-direction exactly when the Jacobian is symmetric). Only this
    // pairing makes the balance m1*lambda + m2*mu = div X(p0) hold for
    // asymmetric exponent patterns.
    auto check_aligned = [&](const RPoly& f, const std::array<double, 2>& vdir) {
      auto grad = exact_gradient(f, x0, y0);
      double gx = to_double(grad[0]), gy = to_double(grad[1]);
      double gn = std::hypot(gx, gy);
      if (gn == 0 || std::abs(gx * vdir[0] + gy * vdir[1]) > 1e-8 * gn)
        throw std::runtime_error("separatrix factor mismatch");
    };
    check_aligned(f_lambda, saddle.evec_mu);
    check_aligned(f_mu, saddle.evec_lambda);
    out.m1 = multiplicity_of_factor(v.v, f_lambda);
    out.m2 = multiplicity_of_factor(v.v, f_mu);
    if (out.m1 > 0 && out.m2 > 0) {
      auto u1 = divide_exact(v.v, f_lambda.pow(out.m1));
      if (u1) {
        auto u2 = divide_exact(*u1, f_mu.pow(out.m2));
        out.unit_nonzero = u2 && !is_zero(u2->eval(x0, y0));
      }
    }
  }

  // balance m1*lambda + m2*mu = div X(p0), exact
  const JacobianInfo& J = *saddle.exact_jac;
  QuadExt bal = J.l1 * QuadExt(out.m1) + J.l2 * QuadExt(out.m2);
  out.balance_ok = (bal == QuadExt(J.trace));

  // case table: (ii) nonresonant, (iii) resonant strong, (iv) weak
  if (!saddle.strong) {
    out.case_ok = (out.m1 == out.m2 && out.m1 >= 1);
    out.case_label = "weak saddle: V = f_lambda^m f_mu^m u";
  } else if (saddle.resonance) {
    auto [p, q] = *saddle.resonance;
    out.case_ok = false;
    for (int k = 0; 1 + k * q <= out.m1 + 1; ++k)
      if (out.m1 == 1 + k * q && out.m2 == 1 + k * p) {
        out.case_ok = true;
        out.case_label = "resonant strong saddle: V = f_lambda^{1+kq} f_mu^{1+kp} u, k = " +
                         std::to_string(k);
        break;
      }
    if (!out.case_ok) out.case_label = "resonant strong saddle: exponent pattern violated";
  } else {
    out.case_ok = (out.m1 == 1 && out.m2 == 1);
    out.case_label = "nonresonant saddle: V = f_lambda f_mu u";
  }
  return out;
}

namespace {

// Univariate truncated composition g(X, h(X)) where h has terms X^k only.
// Truncates inside the power accumulation so high-degree inputs never trip
// the global degree guard.
RPoly graph_substitute(const RPoly& g, const RPoly& h, int cap) {
  if (g.is_zero_poly()) return RPoly();
  return nfdetail::compose_shift(g, RPoly::var_x(), h, cap);
}

// Invariant-branch graph eta = h(xi) for the eigenfield (f, g) with
// eigenvalues (l_along, l_across): solves g(X,h) = h'(X) f(X,h) degree by
// degree; divisor k*l_along - l_across never vanishes at a saddle.
RPoly branch_graph(const BiPoly<Rational>& f, const BiPoly<Rational>& g, const Rational& l_along,
                   const Rational& l_across, int degree) {
  RPoly h;  // series in X alone
  for (int k = 2; k <= degree; ++k) {
    RPoly lhs = graph_substitute(g, h, k);
    RPoly rhs = h.is_zero_poly() ? RPoly() : mul_trunc(h.dx(), graph_substitute(f, h, k), k);
    RPoly resid = lhs - rhs;
    Rational rk = resid.coeff(k, 0);
    if (is_zero(rk)) continue;
    Rational div = Rational(k) * l_along - l_across;
    h.add_term(k, 0, rk / div);
  }
  return h;
}

struct BranchData {
  EigenField<Rational> ef;
  RPoly h;           // graph eta = h(xi) in swapped-if-stable coordinates
  bool swapped;      // true when the branch follows the mu direction
};

BranchData branch_data(const PlanarSystem& sys, const SaddleInfo& saddle, SeparatrixBranch branch,
                       int degree) {
  if (!saddle.exact || !saddle.exact_jac || !saddle.rational_eigenvalues)
    throw std::runtime_error("irrational eigenvalues: exact normal form unsupported");
  const JacobianInfo& J = *saddle.exact_jac;
  BranchData bd;
  bd.ef = eigen_field<Rational>(sys, saddle.rx, saddle.ry, J.m, J.l1.a, J.l2.a);
  bd.swapped = (branch == SeparatrixBranch::Stable);
  if (!bd.swapped) {
    bd.h = branch_graph(bd.ef.f, bd.ef.g, J.l1.a, J.l2.a, degree);
  } else {
    // swap roles: along = eta (mu direction); rewrite the field with
    // variables exchanged so the graph solver sees (along, across)
    auto swap_vars = [](const RPoly& w) {
      RPoly r;
      for (const auto& [m, c] : w.terms) r.add_term(m.j, m.i, c);
      return r;
    };
    bd.h = branch_graph(swap_vars(bd.ef.g), swap_vars(bd.ef.f), J.l2.a, J.l1.a, degree);
  }
  return bd;
}

}  // namespace

RPoly separatrix_series(const PlanarSystem& sys, const SaddleInfo& saddle, SeparatrixBranch branch,
                        int degree) {
  if (degree < 2) throw std::invalid_argument("degree must be at least 2");
  BranchData bd = branch_data(sys, saddle, branch, degree);
  const JacobianInfo& J = *saddle.exact_jac;
  std::array<Rational, 2> r1 = left_row<Rational>(J.m, J.l1.a);
  std::array<Rational, 2> r2 = left_row<Rational>(J.m, J.l2.a);
  normalize_row(r1);
  normalize_row(r2);
  RPoly dx = RPoly::var_x() - RPoly::constant(saddle.rx);
  RPoly dy = RPoly::var_y() - RPoly::constant(saddle.ry);
  RPoly xi = dx.scaled(r1[0]) + dy.scaled(r1[1]);
  RPoly eta = dx.scaled(r2[0]) + dy.scaled(r2[1]);
  const RPoly& along = bd.swapped ? eta : xi;
  const RPoly& across = bd.swapped ? xi : eta;
  // across - h(along), expanded as an exact polynomial in (x, y)
  RPoly comp = bd.h.is_zero_poly()
                   ? RPoly()
                   : bd.h.eval_gen<RPoly>(along, RPoly::var_y(),
                                          [](const Rational& c) { return RPoly::constant(c); });
  return across - comp;
}

TransverseMultiplicity transverse_multiplicity(const PlanarSystem& sys, const SaddleInfo& saddle,
                                               const RPoly& v, SeparatrixBranch branch,
                                               int degree) {
  if (degree < 2) throw std::invalid_argument("degree must be at least 2");
  if (v.is_zero_poly()) throw std::invalid_argument("zero polynomial has no multiplicity");
  BranchData bd = branch_data(sys, saddle, branch, degree);
  const JacobianInfo& J = *saddle.exact_jac;
  // V in eigencoordinates: substitute (x,y) = p0 + M^{-1} (xi, eta)
  std::array<Rational, 2> r1 = left_row<Rational>(J.m, J.l1.a);
  std::array<Rational, 2> r2 = left_row<Rational>(J.m, J.l2.a);
  normalize_row(r1);
  normalize_row(r2);
  Rational det = r1[0] * r2[1] - r1[1] * r2[0];
  RPoly X = RPoly::var_x(), Y = RPoly::var_y();
  RPoly xpoly = RPoly::constant(saddle.rx) + X.scaled(r2[1] / det) + Y.scaled(-r1[1] / det);
  RPoly ypoly = RPoly::constant(saddle.ry) + X.scaled(-r2[0] / det) + Y.scaled(r1[0] / det);
  auto conv = [](const Rational& c) { return RPoly::constant(c); };
  RPoly ve = v.eval_gen<RPoly>(xpoly, ypoly, conv);
  // straighten the branch: along-variable -> x, transverse w -> y; the scan
  // below only inspects monomials with both exponents <= degree, so the
  // substitution may be truncated at twice that total degree
  RPoly along_expr = X;
  RPoly across_expr = Y + bd.h;  // eta = w + h(along) (xi = w + h(along) when swapped)
  int cap = 2 * degree;
  RPoly straightened = bd.swapped
                           ? nfdetail::compose_shift(ve, across_expr, along_expr, cap)
                           : nfdetail::compose_shift(ve, along_expr, across_expr, cap);
  TransverseMultiplicity tm;
  tm.order_valid_to = degree;
  for (int j = 0; j <= degree; ++j) {
    for (const auto& [m, c] : straightened.terms) {
      if (m.j == j && m.i <= degree && !is_zero(c)) {
        tm.m = j;
        return tm;
      }
    }
  }
  throw std::runtime_error("V identically small");
}

bool formal_iif_consistency(const SaddleQuantities& sq, int m) {
  if (m < 1) throw std::invalid_argument("multiplicity must be at least 1");
  if (static_cast<int>(sq.alphas.size()) < m)
    throw std::invalid_argument("insufficient saddle quantities for the requested multiplicity");
  for (int i = 1; i < m; ++i)
    if (!is_zero(sq.alphas[i - 1]))
      throw std::runtime_error("contradiction: alpha_k != 0 for k < m");
  return !is_zero(sq.alphas[m - 1]);
}

}  // namespace iif
