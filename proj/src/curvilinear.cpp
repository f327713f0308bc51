#include "iif/curvilinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iif {
namespace {

// Forward-mode dual number: value + derivative with respect to n.
struct Dual {
  double v = 0, d = 0;
  friend Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(Dual a, Dual b) {
    double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
  }
};

Dual dconst(double v) { return {v, 0}; }

// Gauss-Legendre 5-point nodes/weights on [0,1].
constexpr double GL_X[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052841,
                            0.953089922969332};
constexpr double GL_W[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                            0.239314335249683, 0.118463442528095};

}  // namespace

double SplineOrbit::Spline::eval(double uu, double* d1, double* d2) const {
  size_t nseg = a.size();
  // locate segment: u has nseg+1 entries
  size_t lo = 0, hi = nseg - 1;
  while (lo < hi) {
    size_t mid = (lo + hi + 1) / 2;
    if (u[mid] <= uu)
      lo = mid;
    else
      hi = mid - 1;
  }
  double t = uu - u[lo];
  if (d1) *d1 = b[lo] + t * (2 * c[lo] + 3 * d[lo] * t);
  if (d2) *d2 = 2 * c[lo] + 6 * d[lo] * t;
  return a[lo] + t * (b[lo] + t * (c[lo] + d[lo] * t));
}

namespace {

// Builds cubic spline coefficients for knots (u_k, v_k); natural or periodic.
void build_spline(const std::vector<double>& uk, const std::vector<double>& vk, bool periodic,
                  double period, SplineOrbit* owner, std::vector<double>& a,
                  std::vector<double>& b, std::vector<double>& c, std::vector<double>& d,
                  std::vector<double>& useg) {
  (void)owner;
  size_t n = uk.size();
  if (n < 3) throw std::invalid_argument("spline needs at least 3 samples");
  std::vector<double> m(n, 0.0);  // second derivatives at knots
  if (!periodic) {
    // natural spline: tridiagonal solve, m[0] = m[n-1] = 0
    std::vector<double> diag(n, 0), off(n, 0), rhs(n, 0), h(n - 1);
    for (size_t k = 0; k + 1 < n; ++k) h[k] = uk[k + 1] - uk[k];
    std::vector<double> cp(n, 0), dp(n, 0);
    // forward sweep on interior rows 1..n-2
    for (size_t k = 1; k + 1 < n; ++k) {
      diag[k] = 2 * (h[k - 1] + h[k]);
      off[k] = h[k];
      rhs[k] = 6 * ((vk[k + 1] - vk[k]) / h[k] - (vk[k] - vk[k - 1]) / h[k - 1]);
    }
    for (size_t k = 1; k + 1 < n; ++k) {
      double sub = (k > 1) ? h[k - 1] : 0.0;
      double denom = diag[k] - sub * cp[k - 1];
      cp[k] = off[k] / denom;
      dp[k] = (rhs[k] - sub * dp[k - 1]) / denom;
    }
    for (size_t k = n - 2; k >= 1; --k) {
      m[k] = dp[k] - cp[k] * m[k + 1];
      if (k == 1) break;
    }
    size_t nseg = n - 1;
    a.resize(nseg);
    b.resize(nseg);
    c.resize(nseg);
    d.resize(nseg);
    useg.assign(uk.begin(), uk.end());
    for (size_t k = 0; k < nseg; ++k) {
      double hk = h[k];
      a[k] = vk[k];
      b[k] = (vk[k + 1] - vk[k]) / hk - hk * (2 * m[k] + m[k + 1]) / 6;
      c[k] = m[k] / 2;
      d[k] = (m[k + 1] - m[k]) / (6 * hk);
    }
  } else {
    // periodic spline over knots 0..n-1 with wrap interval back to knot 0
    size_t N = n;  // unknowns m[0..n-1], m[n] = m[0]
    std::vector<double> h(N);
    for (size_t k = 0; k + 1 < n; ++k) h[k] = uk[k + 1] - uk[k];
    h[N - 1] = period - uk[n - 1];  // closing interval
    auto vnext = [&](size_t k) { return (k + 1 < n) ? vk[k + 1] : vk[0]; };
    // cyclic tridiagonal: row k couples m[k-1], m[k], m[k+1] (indices mod N)
    std::vector<double> diag(N), rhs(N), lower(N), upper(N);
    for (size_t k = 0; k < N; ++k) {
      size_t km = (k + N - 1) % N;
      diag[k] = 2 * (h[km] + h[k]);
      lower[k] = h[km];
      upper[k] = h[k];
      double dv1 = (vnext(k) - vk[k]) / h[k];
      double dv0 = (vk[k] - vk[km]) / h[km];
      rhs[k] = 6 * (dv1 - dv0);
    }
    // Sherman-Morrison for the cyclic terms
    std::vector<double> u(N, 0.0);
    double alpha = lower[0], beta = upper[N - 1];
    double gamma = -diag[0];
    std::vector<double> dd = diag;
    dd[0] -= gamma;
    dd[N - 1] -= alpha * beta / gamma;
    auto solve_tri = [&](std::vector<double> r) {
      std::vector<double> cp(N, 0), x(N, 0);
      std::vector<double> dloc = dd;
      for (size_t k = 1; k < N; ++k) {
        double w = lower[k] / dloc[k - 1];
        dloc[k] -= w * upper[k - 1];
        r[k] -= w * r[k - 1];
      }
      x[N - 1] = r[N - 1] / dloc[N - 1];
      for (size_t k = N - 1; k-- > 0;) x[k] = (r[k] - upper[k] * x[k + 1]) / dloc[k];
      return x;
    };
    u[0] = gamma;
    u[N - 1] = beta;
    std::vector<double> x1 = solve_tri(rhs);
    std::vector<double> x2 = solve_tri(u);
    double vx1 = x1[0] + (alpha / gamma) * x1[N - 1];
    double vx2 = x2[0] + (alpha / gamma) * x2[N - 1];
    double fact = vx1 / (1.0 + vx2);
    for (size_t k = 0; k < N; ++k) m[k] = x1[k] - fact * x2[k];
    size_t nseg = N;
    a.resize(nseg);
    b.resize(nseg);
    c.resize(nseg);
    d.resize(nseg);
    useg.resize(nseg + 1);
    for (size_t k = 0; k < nseg; ++k) useg[k] = uk[k];
    useg[nseg] = period;
    for (size_t k = 0; k < nseg; ++k) {
      double hk = h[k];
      double mk = m[k], mk1 = m[(k + 1) % N];
      double v0 = vk[k], v1 = vnext(k);
      a[k] = v0;
      b[k] = (v1 - v0) / hk - hk * (2 * mk + mk1) / 6;
      c[k] = mk / 2;
      d[k] = (mk1 - mk) / (6 * hk);
    }
  }
}

}  // namespace

SplineOrbit::SplineOrbit(const std::vector<double>& xs_in, const std::vector<double>& ys_in,
                         bool periodic)
    : periodic_(periodic) {
  std::vector<double> xs = xs_in, ys = ys_in;
  if (xs.size() != ys.size() || xs.size() < 4)
    throw std::invalid_argument("orbit needs at least 4 samples");
  if (periodic) {
    // drop a duplicated closing sample
    while (xs.size() > 4 && std::hypot(xs.back() - xs.front(), ys.back() - ys.front()) <
                                1e-7 * (1 + std::abs(xs.front()) + std::abs(ys.front()))) {
      xs.pop_back();
      ys.pop_back();
    }
  }
  size_t n = xs.size();
  std::vector<double> uk(n, 0.0);
  for (size_t k = 1; k < n; ++k)
    uk[k] = uk[k - 1] + std::hypot(xs[k] - xs[k - 1], ys[k] - ys[k - 1]);
  double period = uk[n - 1];
  if (periodic) period += std::hypot(xs[0] - xs[n - 1], ys[0] - ys[n - 1]);
  u_total_ = periodic ? period : uk[n - 1];
  build_spline(uk, xs, periodic, period, this, sx_.a, sx_.b, sx_.c, sx_.d, sx_.u);
  build_spline(uk, ys, periodic, period, this, sy_.a, sy_.b, sy_.c, sy_.d, sy_.u);
  // cumulative arc length over a fine subdivision (Gauss per cell)
  const int SUB = 8;
  size_t cells = (sx_.a.size()) * SUB;
  s_table_.resize(cells + 1);
  u_table_.resize(cells + 1);
  s_table_[0] = 0;
  u_table_[0] = 0;
  size_t idx = 1;
  for (size_t seg = 0; seg < sx_.a.size(); ++seg) {
    double u0 = sx_.u[seg], u1 = sx_.u[seg + 1];
    double du = (u1 - u0) / SUB;
    for (int s = 0; s < SUB; ++s, ++idx) {
      double ua = u0 + s * du;
      double acc = 0;
      for (int g = 0; g < 5; ++g) {
        double ug = ua + GL_X[g] * du;
        double dx1, dy1;
        sx_.eval(ug, &dx1);
        sy_.eval(ug, &dy1);
        acc += GL_W[g] * std::hypot(dx1, dy1);
      }
      s_table_[idx] = s_table_[idx - 1] + acc * du;
      u_table_[idx] = ua + du;
    }
  }
  length_ = s_table_.back();
}

SplineOrbit SplineOrbit::from_trajectory(const Trajectory& tr, bool periodic) {
  return SplineOrbit(tr.xs, tr.ys, periodic);
}

double SplineOrbit::u_of_s(double s) const {
  if (periodic_) {
    s = std::fmod(s, length_);
    if (s < 0) s += length_;
  } else {
    s = std::clamp(s, 0.0, length_);
  }
  // seed from the table, polish by Newton on the arc-length function
  auto it = std::upper_bound(s_table_.begin(), s_table_.end(), s);
  size_t j = std::min<size_t>(std::max<ptrdiff_t>(1, it - s_table_.begin()), s_table_.size() - 1);
  double s0 = s_table_[j - 1], s1 = s_table_[j];
  double u0 = u_table_[j - 1], u1 = u_table_[j];
  double u = u0 + (u1 - u0) * ((s1 == s0) ? 0.0 : (s - s0) / (s1 - s0));
  for (int it2 = 0; it2 < 4; ++it2) {
    // arc length from u0 to u via Gauss
    double acc = 0, du = u - u0;
    for (int g = 0; g < 5; ++g) {
      double ug = u0 + GL_X[g] * du;
      double dx1, dy1;
      sx_.eval(ug, &dx1);
      sy_.eval(ug, &dy1);
      acc += GL_W[g] * std::hypot(dx1, dy1);
    }
    double f = s0 + acc * du - s;
    double dx1, dy1;
    sx_.eval(u, &dx1);
    sy_.eval(u, &dy1);
    double speed = std::hypot(dx1, dy1);
    if (speed == 0) break;
    u -= f / speed;
  }
  return u;
}

void SplineOrbit::eval(double s, double out[6]) const {
  double u = u_of_s(s);
  double x1, x2, y1, y2;
  double x = sx_.eval(u, &x1, &x2);
  double y = sy_.eval(u, &y1, &y2);
  double v = std::hypot(x1, y1);
  double vp = (x1 * x2 + y1 * y2) / v;  // dv/du
  out[0] = x;
  out[1] = y;
  out[2] = x1 / v;
  out[3] = y1 / v;
  out[4] = (x2 - x1 * vp / v) / (v * v);
  out[5] = (y2 - y1 * vp / v) / (v * v);
}

void CurvilinearFrame::chart(double s, double n, double& x, double& y) const {
  double o[6];
  orbit->eval(s, o);
  x = o[0] - n * o[3];
  y = o[1] + n * o[2];
}

double CurvilinearFrame::speed(double s) const {
  double o[6];
  orbit->eval(s, o);
  return std::hypot(o[2], o[3]);
}

CurvilinearFrame make_frame(std::shared_ptr<const OrbitParam> orbit, double radius_cap) {
  CurvilinearFrame fr;
  fr.orbit = std::move(orbit);
  const int SAMPLES = 512;
  double L = fr.orbit->length();
  double min_r = radius_cap / 0.3;
  double o[6];
  for (int k = 0; k < SAMPLES; ++k) {
    double s = L * k / SAMPLES;
    fr.orbit->eval(s, o);
    double v = std::hypot(o[2], o[3]);
    if (v == 0) throw std::invalid_argument("orbit parameterization is singular");
    double kappa = std::abs(o[2] * o[5] - o[3] * o[4]) / (v * v * v);
    if (kappa > 1e-14) min_r = std::min(min_r, 1.0 / kappa);
  }
  fr.tube_radius = 0.3 * std::min(min_r, radius_cap / 0.3);
  return fr;
}

std::pair<double, double> to_curvilinear(const CurvilinearFrame& frame, double x, double y) {
  const int SEED_SAMPLES = 512;
  double L = frame.length();
  double best_s = 0, best_d = std::numeric_limits<double>::infinity();
  double o[6];
  for (int k = 0; k <= SEED_SAMPLES; ++k) {
    double s = L * k / SEED_SAMPLES;
    frame.orbit->eval(s, o);
    double d = std::hypot(o[0] - x, o[1] - y);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  double s = best_s, n = 0;
  double rx = 0, ry = 0;
  auto residual = [&](double ss, double nn, double& gx, double& gy) {
    double cx, cy;
    frame.chart(ss, nn, cx, cy);
    gx = cx - x;
    gy = cy - y;
    return std::hypot(gx, gy);
  };
  double r = residual(s, n, rx, ry);
  for (int it = 0; it < 60 && r > 1e-12; ++it) {
    frame.orbit->eval(s, o);
    // chart differential: d(x,y)/d(s,n)
    double xs = o[2] - n * o[5], xn = -o[3];
    double ys = o[3] + n * o[4], yn = o[2];
    double det = xs * yn - xn * ys;
    if (std::abs(det) < 1e-14) throw std::runtime_error("outside tubular neighborhood");
    double ds = (-rx * yn + ry * xn) / det;
    double dn = (ys * rx - xs * ry) / det;
    // damped update
    double lam = 1.0;
    for (int half = 0; half < 30; ++half) {
      double s2 = s + lam * ds, n2 = n + lam * dn;
      double gx2, gy2;
      double r2 = residual(s2, n2, gx2, gy2);
      if (r2 < r) {
        s = s2;
        n = n2;
        r = r2;
        rx = gx2;
        ry = gy2;
        break;
      }
      lam /= 2;
      if (half == 29) throw std::runtime_error("outside tubular neighborhood");
    }
  }
  if (r > 1e-10) throw std::runtime_error("outside tubular neighborhood");
  if (std::abs(n) > frame.tube_radius) throw std::runtime_error("outside tubular neighborhood");
  if (frame.periodic()) {
    s = std::fmod(s, L);
    if (s < 0) s += L;
  }
  return {s, n};
}

namespace {

void frame_fields_dual(const CurvilinearFrame& frame, const PlanarSystem& sys, double s, Dual n,
                       Dual& N, Dual& S, Dual& J) {
  double o[6];
  frame.orbit->eval(s, o);
  Dual x = dconst(o[0]) - n * dconst(o[3]);
  Dual y = dconst(o[1]) + n * dconst(o[2]);
  auto conv = [](const Rational& c) { return dconst(to_double(c)); };
  Dual P = sys.p.is_zero_poly() ? dconst(0) : sys.p.eval_gen<Dual>(x, y, conv);
  Dual Q = sys.q.is_zero_poly() ? dconst(0) : sys.q.eval_gen<Dual>(x, y, conv);
  J = dconst(o[2] * o[2] + o[3] * o[3]) + n * dconst(o[3] * o[4] - o[2] * o[5]);
  S = (dconst(o[2]) * P + dconst(o[3]) * Q) / J;
  N = ((dconst(-o[3]) - n * dconst(o[4])) * P + (dconst(o[2]) - n * dconst(o[5])) * Q) / J;
}

}  // namespace

FrameFields frame_fields(const CurvilinearFrame& frame, const PlanarSystem& sys, double s,
                         double n) {
  double o[6];
  frame.orbit->eval(s, o);
  double x = o[0] - n * o[3];
  double y = o[1] + n * o[2];
  double P = sys.p.eval_d(x, y), Q = sys.q.eval_d(x, y);
  double J = o[2] * o[2] + o[3] * o[3] + n * (o[3] * o[4] - o[2] * o[5]);
  FrameFields ffv;
  ffv.jac = J;
  ffv.s_dot = (o[2] * P + o[3] * Q) / J;
  ffv.n_dot = ((-o[3] - n * o[4]) * P + (o[2] - n * o[5]) * Q) / J;
  if (std::abs(ffv.s_dot) < 1e-12) throw std::runtime_error("S vanished");
  ffv.f = ffv.n_dot / ffv.s_dot;
  return ffv;
}

double frame_f_dn(const CurvilinearFrame& frame, const PlanarSystem& sys, double s, double n) {
  Dual N, S, J;
  frame_fields_dual(frame, sys, s, Dual{n, 1.0}, N, S, J);
  if (std::abs(S.v) < 1e-12) throw std::runtime_error("S vanished");
  Dual F = N / S;
  return F.d;
}

double tilde_v(const CurvilinearFrame& frame, const PlanarSystem& sys, const RPoly& v, double s,
               double n) {
  FrameFields ffv = frame_fields(frame, sys, s, n);
  double x, y;
  frame.chart(s, n, x, y);
  return v.eval_d(x, y) / (ffv.jac * ffv.s_dot);
}

MultiplicityEstimate numeric_multiplicity(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                          const RPoly& v, const std::vector<double>& s_samples,
                                          double n_lo, double n_hi, int n_count) {
  (void)sys;
  if (s_samples.empty()) throw std::invalid_argument("need at least one s sample");
  if (!(n_lo > 0 && n_hi > n_lo && n_count >= 4))
    throw std::invalid_argument("bad n grid");
  MultiplicityEstimate est;
  std::vector<double> slopes;
  double vmax_all = 0;
  for (double s : s_samples) {
    // least squares of log|V| on log n over a geometric grid
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    double vmid = 0;
    for (int k = 0; k < n_count; ++k) {
      double n = n_lo * std::pow(n_hi / n_lo, double(k) / (n_count - 1));
      double x, y;
      frame.chart(s, n, x, y);
      double val = v.eval_d(x, y);
      vmax_all = std::max(vmax_all, std::abs(val));
      if (k == n_count / 2) vmid = val;
      if (val == 0) continue;
      double lx = std::log(n), ly = std::log(std::abs(val));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    if (cnt < n_count - 1) throw std::runtime_error("V identically small");
    double denom = cnt * sxx - sx * sx;
    double slope = (cnt * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / cnt;
    slopes.push_back(slope);
    double lead = std::exp(intercept);
    est.leading_coeff_samples.push_back({s, vmid >= 0 ? lead : -lead});
  }
  if (vmax_all < 1e-14) throw std::runtime_error("V identically small");
  double mean = 0;
  for (double sl : slopes) mean += sl;
  mean /= slopes.size();
  int m = static_cast<int>(std::lround(mean));
  double worst = 0;
  for (double sl : slopes) worst = std::max(worst, std::abs(sl - m));
  if (m < 0 || worst > 0.05) throw std::runtime_error("inconsistent multiplicity across s");
  est.m = m;
  est.fit_residual = worst;
  return est;
}

double verify_transition_identity(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                  const RPoly& v, const std::vector<double>& sigma_grid,
                                  const OdeOptions& opts) {
  double o[6];
  double L = frame.length();
  frame.orbit->eval(L, o);
  double vL = std::hypot(o[2], o[3]);
  frame.orbit->eval(0.0, o);
  double v0 = std::hypot(o[2], o[3]);
  double nx = -o[3] / v0, ny = o[2] / v0;
  Section sec = Section::make(sys, o[0], o[1], nx, ny, 0);
  double worst = 0;
  for (double sigma : sigma_grid) {
    MapSample ms = transition_map(sys, sec, sec, sigma * v0, opts);
    double n_img = ms.image / vL;
    double lhs = tilde_v(frame, sys, v, L, n_img);
    double rhs = tilde_v(frame, sys, v, 0.0, sigma) * ms.derivative * (v0 / vL);
    double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-15});
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  return worst;
}

double tilde_v_transport_invariant(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                   const RPoly& v, double n0, double s_end) {
  detail::Rhs rhs = [&](double s, const double* y, double* dy) {
    Dual N, S, J;
    frame_fields_dual(frame, sys, s, Dual{y[0], 1.0}, N, S, J);
    Dual F = N / S;
    dy[0] = F.v;
    dy[1] = F.d;
  };
  int status = 0;
  double ref = tilde_v(frame, sys, v, 0.0, n0);
  double worst = 0;
  auto sol = detail::dp5_integrate(rhs, 2, {n0, 0.0}, 0.0, s_end, 1e-12, 1e-14, 1e-4,
                                   [](const detail::StepRecord&) { return false; }, status);
  if (status == 2) throw std::runtime_error("step underflow near singular point");
  for (const auto& rec : sol.steps) {
    double endstate[2];
    double s1 = rec.t0 + rec.h;
    sol.eval(s1, endstate);
    double val = tilde_v(frame, sys, v, s1, endstate[0]) / std::exp(endstate[1]);
    worst = std::max(worst, std::abs(val - ref) / std::max(std::abs(ref), 1e-15));
  }
  return worst;
}

double implicit_poincare_check(double sigma, double pi_value, double lambda, double m1,
                               double m2, double k0) {
  (void)lambda;
  double sm = std::sqrt(m2);
  auto R = [&](double u) {
    if (!(u > 0 && u < sm)) throw std::domain_error("offset outside (0, sqrt(m2))");
    double num = std::pow(std::abs(u * (u - 2 * sm)), (1 + m1) / 2);
    double den = std::pow(std::abs(u - sm), m1);
    return num / den;
  };
  double lhs = R(pi_value), rhs = k0 * R(sigma);
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

}  // namespace iif
