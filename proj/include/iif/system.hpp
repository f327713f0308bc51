#pragma once

#include "iif/bipoly.hpp"
#include "iif/parampoly.hpp"
#include "iif/rational.hpp"

#include <array>
#include <optional>
#include <string>

namespace iif {

// Planar polynomial vector field xdot = P(x,y), ydot = Q(x,y) over an exact
// coefficient ring R.
template <class R>
struct System2 {
  BiPoly<R> p, q;

  System2() = default;
  System2(BiPoly<R> p_, BiPoly<R> q_) : p(std::move(p_)), q(std::move(q_)) {
    if (p.is_zero_poly() && q.is_zero_poly())
      throw std::invalid_argument("vector field is identically zero");
  }
};

using PlanarSystem = System2<Rational>;
using ParamSystem = System2<ParamPoly>;

template <class R>
BiPoly<R> divergence(const System2<R>& sys) {
  return sys.p.dx() + sys.q.dy();
}

// Lie derivative of f along the field: X f = P f_x + Q f_y.
template <class R>
BiPoly<R> lie_derivative(const System2<R>& sys, const BiPoly<R>& f) {
  return sys.p * f.dx() + sys.q * f.dy();
}

struct JacobianInfo {
  std::array<Rational, 4> m;  // row-major [[a,b],[c,d]]
  Rational trace, det, disc;  // disc = trace^2 - 4 det
  bool real_eigenvalues = false;
  bool rational_eigenvalues = false;
  QuadExt l1, l2;  // valid when real; l1 >= l2
};

inline JacobianInfo jacobian_exact(const PlanarSystem& sys, const Rational& x0, const Rational& y0) {
  JacobianInfo info;
  info.m = {sys.p.dx().eval(x0, y0), sys.p.dy().eval(x0, y0), sys.q.dx().eval(x0, y0),
            sys.q.dy().eval(x0, y0)};
  info.trace = info.m[0] + info.m[3];
  info.det = info.m[0] * info.m[3] - info.m[1] * info.m[2];
  info.disc = info.trace * info.trace - 4 * info.det;
  if (info.disc >= 0) {
    info.real_eigenvalues = true;
    QuadExt s = QuadExt::sqrt_of(info.disc);
    QuadExt half(Rational(1, 2));
    info.l1 = (QuadExt(info.trace) + s) * half;
    info.l2 = (QuadExt(info.trace) - s) * half;
    info.rational_eigenvalues = info.l1.is_rational() && info.l2.is_rational();
  }
  return info;
}

struct SingularPoint {
  double x = 0, y = 0;
  bool exact = false;
  Rational rx, ry;                // meaningful when exact
  std::array<double, 4> jac{};    // row-major
  double divergence_value = 0;
  std::optional<JacobianInfo> exact_jac;
};

// Verifies that pt is a singular point. Exact-rational points are checked
// exactly; float points against an absolute tolerance (default 1e-10).
inline SingularPoint verify_singular(const PlanarSystem& sys, const Rational& x0, const Rational& y0) {
  if (!sys.p.eval(x0, y0).is_zero() || !sys.q.eval(x0, y0).is_zero())
    throw std::runtime_error("not singular");
  SingularPoint sp;
  sp.exact = true;
  sp.rx = x0;
  sp.ry = y0;
  sp.x = to_double(x0);
  sp.y = to_double(y0);
  JacobianInfo info = jacobian_exact(sys, x0, y0);
  for (int k = 0; k < 4; ++k) sp.jac[k] = to_double(info.m[k]);
  sp.divergence_value = to_double(info.trace);
  sp.exact_jac = info;
  return sp;
}

inline SingularPoint verify_singular(const PlanarSystem& sys, double x0, double y0,
                                     double tol = 1e-10) {
  if (std::abs(sys.p.eval_d(x0, y0)) > tol || std::abs(sys.q.eval_d(x0, y0)) > tol)
    throw std::runtime_error("not singular");
  SingularPoint sp;
  sp.x = x0;
  sp.y = y0;
  sp.jac = {sys.p.dx().eval_d(x0, y0), sys.p.dy().eval_d(x0, y0), sys.q.dx().eval_d(x0, y0),
            sys.q.dy().eval_d(x0, y0)};
  sp.divergence_value = sp.jac[0] + sp.jac[3];
  return sp;
}

// Cofactor k with X f = k f when f is an invariant algebraic curve of the
// field; empty when f is not invariant.
template <class R>
std::optional<BiPoly<R>> invariant_curve_cofactor(const System2<R>& sys, const BiPoly<R>& f) {
  if (f.is_zero_poly()) throw std::invalid_argument("invariant curve must be nonzero");
  return divide_exact(lie_derivative(sys, f), f);
}

}  // namespace iif
