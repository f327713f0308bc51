#include "iif/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace iif {
namespace {

// Flattened double-precision view of an exact polynomial for fast evaluation
// in integrator right-hand sides.
struct FastPoly {
  struct Term {
    int i, j;
    double c;
  };
  std::vector<Term> terms;
  int max_i = 0, max_j = 0;

  explicit FastPoly(const RPoly& p = RPoly()) {
    for (const auto& [m, c] : p.terms) {
      terms.push_back({m.i, m.j, to_double(c)});
      max_i = std::max(max_i, m.i);
      max_j = std::max(max_j, m.j);
    }
  }

  double eval(double x, double y) const {
    double xp[72], yp[72];
    xp[0] = 1;
    for (int k = 1; k <= max_i; ++k) xp[k] = xp[k - 1] * x;
    yp[0] = 1;
    for (int k = 1; k <= max_j; ++k) yp[k] = yp[k - 1] * y;
    double s = 0;
    for (const auto& t : terms) s += t.c * xp[t.i] * yp[t.j];
    return s;
  }
};

struct FastField {
  FastPoly p, q, px, py, qx, qy, div;
  explicit FastField(const PlanarSystem& sys)
      : p(sys.p),
        q(sys.q),
        px(sys.p.dx()),
        py(sys.p.dy()),
        qx(sys.q.dx()),
        qy(sys.q.dy()),
        div(divergence(sys)) {}
};

// Dormand-Prince 5(4) tableau with the standard quartic dense interpolant.
constexpr double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
constexpr double A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double B[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                         -2187.0 / 6784, 11.0 / 84, 0};
constexpr double E[7] = {71.0 / 57600,       0,          -71.0 / 16695, 71.0 / 1920,
                         -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
constexpr double P[7][4] = {
    {1, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0, 0, 0, 0},
    {0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

void dense_eval_step(const detail::StepRecord& rec, int n, double t, double* out) {
  double theta = (t - rec.t0) / rec.h;
  double th[4] = {theta, theta * theta, theta * theta * theta, theta * theta * theta * theta};
  for (int d = 0; d < n; ++d) {
    double acc = 0;
    for (int s = 0; s < 7; ++s) {
      double ps = P[s][0] * th[0] + P[s][1] * th[1] + P[s][2] * th[2] + P[s][3] * th[3];
      acc += rec.k[s * n + d] * ps;
    }
    out[d] = rec.y0[d] + rec.h * acc;
  }
}

}  // namespace

namespace detail {

void DenseSolution::eval(double t, double* out) const {
  if (steps.empty()) throw std::logic_error("empty dense solution");
  // binary search for the step containing t
  size_t lo = 0, hi = steps.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi + 1) / 2;
    if (steps[mid].t0 <= t)
      lo = mid;
    else
      hi = mid - 1;
  }
  dense_eval_step(steps[lo], n, t, out);
}

double DenseSolution::t_end() const {
  if (steps.empty()) return 0;
  return steps.back().t0 + steps.back().h;
}

DenseSolution dp5_integrate(const Rhs& rhs, int n, const std::vector<double>& y0, double t0,
                            double t_end, double rel_tol, double abs_tol, double first_step,
                            const std::function<bool(const StepRecord&)>& after_step,
                            int& status) {
  DenseSolution sol;
  sol.n = n;
  std::vector<double> y = y0, ynew(n), ytmp(n), err(n);
  std::vector<double> k(7 * n);
  double t = t0;
  double h = std::min(first_step, t_end - t0);
  status = 0;
  rhs(t, y.data(), k.data());  // FSAL seed: stage 0
  bool have_k0 = true;
  while (t < t_end) {
    if (h > t_end - t) h = t_end - t;
    if (h < 1e-14) {
      status = 2;
      return sol;
    }
    if (!have_k0) rhs(t, y.data(), k.data());
    have_k0 = true;
    for (int s = 1; s < 7; ++s) {
      for (int d = 0; d < n; ++d) {
        double acc = 0;
        for (int m = 0; m < s; ++m) acc += A[s][m] * k[m * n + d];
        ytmp[d] = y[d] + h * acc;
      }
      rhs(t + C[s] * h, ytmp.data(), k.data() + s * n);
    }
    double err_norm = 0;
    for (int d = 0; d < n; ++d) {
      double ynd = y[d];
      double acc = 0, eacc = 0;
      for (int s = 0; s < 7; ++s) {
        acc += B[s] * k[s * n + d];
        eacc += E[s] * k[s * n + d];
      }
      ynew[d] = ynd + h * acc;
      double scale = abs_tol + rel_tol * std::max(std::abs(ynd), std::abs(ynew[d]));
      double e = h * eacc / scale;
      err_norm += e * e;
    }
    err_norm = std::sqrt(err_norm / n);
    if (err_norm > 1.0) {  // reject, retry with a smaller step
      double factor = std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      h *= factor;
      continue;
    }
    StepRecord rec;
    rec.t0 = t;
    rec.h = h;
    rec.y0 = y;
    rec.k = k;
    sol.steps.push_back(std::move(rec));
    t += h;
    y = ynew;
    // FSAL: stage 6 evaluated at (t+h, ynew) equals stage 0 of the next step
    for (int d = 0; d < n; ++d) k[d] = k[6 * n + d];
    double factor = err_norm == 0 ? 10.0 : std::min(10.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
    h *= factor;
    if (after_step && after_step(sol.steps.back())) {
      status = 1;
      return sol;
    }
  }
  return sol;
}

}  // namespace detail

Section Section::make(const PlanarSystem& sys, double bx, double by, double dx, double dy,
                      int half) {
  double norm = std::hypot(dx, dy);
  if (norm < 1e-14) throw std::invalid_argument("section direction is zero");
  Section s;
  s.bx = bx;
  s.by = by;
  s.dx = dx / norm;
  s.dy = dy / norm;
  s.half = half;
  double px = sys.p.eval_d(bx, by), qy = sys.q.eval_d(bx, by);
  double speed = std::hypot(px, qy);
  if (speed < 1e-12) throw std::invalid_argument("section base point is singular");
  // transversality: field at base must not be parallel to the direction
  double cross = px * s.dy - qy * s.dx;
  if (std::abs(cross) < 1e-10 * speed)
    throw std::invalid_argument("section direction tangent to the field");
  return s;
}

namespace {

// Tracks arming and sign changes of the section line-distance along dense
// steps; reports accepted crossings. An orbit starting on a section must
// leave it before the section can fire.
struct EventWatcher {
  const FastField& field;
  std::vector<Section> sections;
  double sigma_max;
  std::vector<int> required_dir;  // sign of g' at an acceptable crossing; 0 = any
  std::vector<char> armed;
  std::vector<double> gprev;
  double arm_eps = 1e-9;

  EventWatcher(const FastField& f, std::vector<Section> secs, double smax)
      : field(f), sections(std::move(secs)), sigma_max(smax) {
    armed.assign(sections.size(), 0);
    gprev.assign(sections.size(), 0.0);
    required_dir.assign(sections.size(), 0);
  }

  void init(double x, double y) {
    for (size_t i = 0; i < sections.size(); ++i) {
      double g = sections[i].line_dist(x, y);
      armed[i] = std::abs(g) > arm_eps;
      gprev[i] = g;
    }
  }

  // Scans one accepted step; appends accepted hits in time order.
  void scan(const detail::StepRecord& rec, int n, std::vector<EventHit>& out) {
    constexpr int SUB = 4;
    double state[8];
    for (size_t i = 0; i < sections.size(); ++i) {
      const Section& sec = sections[i];
      double tprev = rec.t0;
      double g0 = gprev[i];
      for (int s = 1; s <= SUB; ++s) {
        double t1 = rec.t0 + rec.h * s / SUB;
        dense_eval_step(rec, n, t1, state);
        double g1 = sec.line_dist(state[0], state[1]);
        if (!armed[i]) {
          if (std::abs(g1) > arm_eps) armed[i] = 1;
        } else if ((g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0)) {
          double thit = locate(rec, n, sec, tprev, t1);
          dense_eval_step(rec, n, thit, state);
          double sigma = sec.offset(state[0], state[1]);
          double gdot = -field.p.eval(state[0], state[1]) * sec.dy +
                        field.q.eval(state[0], state[1]) * sec.dx;
          bool ok = sec.offset_in_half(sigma) && std::abs(sigma) <= sigma_max;
          if (required_dir[i] != 0 && gdot * required_dir[i] <= 0) ok = false;
          if (ok) {
            EventHit hit;
            hit.t = thit;
            hit.x = state[0];
            hit.y = state[1];
            hit.sigma = sigma;
            hit.section_index = static_cast<int>(i);
            out.push_back(hit);
          }
        }
        g0 = g1;
        tprev = t1;
      }
      gprev[i] = g0;
    }
    std::sort(out.begin(), out.end(), [](const EventHit& a, const EventHit& b) { return a.t < b.t; });
  }

  double locate(const detail::StepRecord& rec, int n, const Section& sec, double ta,
                double tb) const {
    double state[8];
    dense_eval_step(rec, n, ta, state);
    double ga = sec.line_dist(state[0], state[1]);
    for (int it = 0; it < 80; ++it) {
      double tm = 0.5 * (ta + tb);
      dense_eval_step(rec, n, tm, state);
      double gm = sec.line_dist(state[0], state[1]);
      if (gm == 0 || (tb - ta) < 1e-15 * std::max(1.0, std::abs(tb))) return tm;
      if ((ga < 0) != (gm < 0))
        tb = tm;
      else {
        ta = tm;
        ga = gm;
      }
    }
    return 0.5 * (ta + tb);
  }
};

[[noreturn]] void throw_stop_reason(int stop_reason) {
  switch (stop_reason) {
    case 1:
      throw std::runtime_error("orbit escaped region");
    case 2:
      throw std::runtime_error("step underflow near singular point");
    default:
      throw std::runtime_error("max time exceeded");
  }
}

}  // namespace

Trajectory integrate(const PlanarSystem& sys, double x0, double y0, double t_end,
                     const OdeOptions& opts, const std::vector<Section>& sections) {
  FastField ff(sys);
  detail::Rhs rhs = [&ff](double, const double* y, double* dy) {
    dy[0] = ff.p.eval(y[0], y[1]);
    dy[1] = ff.q.eval(y[0], y[1]);
    dy[2] = ff.div.eval(y[0], y[1]);
  };
  Trajectory tr;
  tr.tolerance = opts.rel_tol;
  EventWatcher watcher(ff, sections, opts.sigma_max);
  watcher.init(x0, y0);
  bool escaped = false;
  int status = 0;
  auto sol = detail::dp5_integrate(rhs, 3, {x0, y0, 0.0}, 0.0, t_end, opts.rel_tol, opts.abs_tol,
                                   opts.first_step,
                                   [&](const detail::StepRecord& rec) {
                                     watcher.scan(rec, 3, tr.hits);
                                     double endstate[3];
                                     dense_eval_step(rec, 3, rec.t0 + rec.h, endstate);
                                     if (std::abs(endstate[0]) > opts.bbox ||
                                         std::abs(endstate[1]) > opts.bbox) {
                                       escaped = true;
                                       return true;
                                     }
                                     return false;
                                   },
                                   status);
  if (escaped) throw std::runtime_error("orbit escaped region");
  if (status == 2) throw std::runtime_error("step underflow near singular point");
  tr.ts.push_back(0.0);
  tr.xs.push_back(x0);
  tr.ys.push_back(y0);
  tr.divint.push_back(0.0);
  double endstate[3];
  for (const auto& rec : sol.steps) {
    dense_eval_step(rec, 3, rec.t0 + rec.h, endstate);
    tr.ts.push_back(rec.t0 + rec.h);
    tr.xs.push_back(endstate[0]);
    tr.ys.push_back(endstate[1]);
    tr.divint.push_back(endstate[2]);
  }
  return tr;
}

MapSample transition_map(const PlanarSystem& sys, const Section& from, const Section& to,
                         double sigma, const OdeOptions& opts) {
  FastField ff(sys);
  detail::Rhs rhs = [&ff](double, const double* y, double* dy) {
    double x = y[0], yy = y[1];
    dy[0] = ff.p.eval(x, yy);
    dy[1] = ff.q.eval(x, yy);
    double a = ff.px.eval(x, yy), b = ff.py.eval(x, yy);
    double c = ff.qx.eval(x, yy), d = ff.qy.eval(x, yy);
    // variational flow of the 2x2 state-transition matrix, column-major pairs
    dy[2] = a * y[2] + b * y[3];
    dy[3] = c * y[2] + d * y[3];
    dy[4] = a * y[4] + b * y[5];
    dy[5] = c * y[4] + d * y[5];
  };
  double x0 = from.bx + sigma * from.dx, y0 = from.by + sigma * from.dy;
  EventWatcher watcher(ff, {to}, opts.sigma_max);
  watcher.init(x0, y0);
  double gdir = -ff.p.eval(to.bx, to.by) * to.dy + ff.q.eval(to.bx, to.by) * to.dx;
  watcher.required_dir[0] = gdir > 0 ? 1 : -1;
  std::vector<EventHit> hits;
  bool escaped = false;
  int status = 0;
  // columns of the state-transition matrix: d/dx0 and d/dy0
  std::vector<double> init = {x0, y0, 1, 0, 0, 1};
  auto sol = detail::dp5_integrate(
      rhs, 6, init, 0.0, opts.max_time, opts.rel_tol, opts.abs_tol, opts.first_step,
      [&](const detail::StepRecord& rec) {
        watcher.scan(rec, 6, hits);
        if (!hits.empty()) return true;
        double endstate[6];
        dense_eval_step(rec, 6, rec.t0 + rec.h, endstate);
        if (std::abs(endstate[0]) > opts.bbox || std::abs(endstate[1]) > opts.bbox) {
          escaped = true;
          return true;
        }
        return false;
      },
      status);
  if (hits.empty()) throw_stop_reason(escaped ? 1 : status == 2 ? 2 : 0);
  const EventHit& hit = hits.front();
  double state[6];
  sol.eval(hit.t, state);
  // state-transition matrix M maps initial displacements to displacements at
  // the hit time; project onto the section parameters, correcting for the
  // first-hit time shift along the flow.
  double m11 = state[2], m12 = state[4], m21 = state[3], m22 = state[5];
  double vx = m11 * from.dx + m12 * from.dy;  // M * (from direction)
  double vy = m21 * from.dx + m22 * from.dy;
  double fx = ff.p.eval(state[0], state[1]), fy = ff.q.eval(state[0], state[1]);
  double n2x = -to.dy, n2y = to.dx;
  double denom = fx * n2x + fy * n2y;
  double tau = -(vx * n2x + vy * n2y) / denom;
  double deriv = (vx * to.dx + vy * to.dy) + (fx * to.dx + fy * to.dy) * tau;
  MapSample ms;
  ms.sigma = sigma;
  ms.image = hit.sigma;
  ms.derivative = deriv;
  ms.time = hit.t;
  return ms;
}

double characteristic_exponent(const PlanarSystem& sys, double cx, double cy,
                               const Section& section, const OdeOptions& opts) {
  FastField ff(sys);
  detail::Rhs rhs = [&ff](double, const double* y, double* dy) {
    dy[0] = ff.p.eval(y[0], y[1]);
    dy[1] = ff.q.eval(y[0], y[1]);
    dy[2] = ff.div.eval(y[0], y[1]);
  };
  EventWatcher watcher(ff, {section}, opts.sigma_max);
  watcher.init(cx, cy);
  double gdir = -ff.p.eval(cx, cy) * section.dy + ff.q.eval(cx, cy) * section.dx;
  if (gdir != 0) watcher.required_dir[0] = gdir > 0 ? 1 : -1;
  std::vector<EventHit> hits;
  bool escaped = false;
  int status = 0;
  auto sol = detail::dp5_integrate(
      rhs, 3, {cx, cy, 0.0}, 0.0, opts.max_time, opts.rel_tol, opts.abs_tol, opts.first_step,
      [&](const detail::StepRecord& rec) {
        watcher.scan(rec, 3, hits);
        if (!hits.empty()) return true;
        double endstate[3];
        dense_eval_step(rec, 3, rec.t0 + rec.h, endstate);
        if (std::abs(endstate[0]) > opts.bbox || std::abs(endstate[1]) > opts.bbox) {
          escaped = true;
          return true;
        }
        return false;
      },
      status);
  if (hits.empty() || escaped) throw std::runtime_error("not periodic");
  const EventHit& hit = hits.front();
  if (std::hypot(hit.x - cx, hit.y - cy) > 1e-5 * std::max(1.0, std::hypot(cx, cy)))
    throw std::runtime_error("not periodic");
  double state[3];
  sol.eval(hit.t, state);
  return state[2];
}

namespace {

// Unit eigenvectors of a 2x2 double matrix with real distinct eigenvalues.
void eigen2(const std::array<double, 4>& m, double& l1, double& l2, double v1[2], double v2[2]) {
  double tr = m[0] + m[3], det = m[0] * m[3] - m[1] * m[2];
  double disc = tr * tr - 4 * det;
  if (disc <= 0) throw std::runtime_error("not a hyperbolic saddle");
  double s = std::sqrt(disc);
  l1 = (tr + s) / 2;
  l2 = (tr - s) / 2;
  auto vec_for = [&](double l, double v[2]) {
    double a = m[0] - l, b = m[1], c = m[2], d = m[3] - l;
    // rows of (J - l I) are proportional; pick the better-conditioned kernel
    if (std::hypot(a, b) >= std::hypot(c, d)) {
      v[0] = -b;
      v[1] = a;
    } else {
      v[0] = -d;
      v[1] = c;
    }
    double nn = std::hypot(v[0], v[1]);
    if (nn == 0) throw std::runtime_error("not a hyperbolic saddle");
    v[0] /= nn;
    v[1] /= nn;
  };
  vec_for(l1, v1);
  vec_for(l2, v2);
}

}  // namespace

Trajectory trace_homoclinic(const PlanarSystem& sys, const SingularPoint& saddle, double offset,
                            double capture_radius, const OdeOptions& opts) {
  if (offset <= 0) throw std::invalid_argument("offset must be positive");
  if (capture_radius <= 0) throw std::invalid_argument("capture radius must be positive");
  double l1, l2, vu[2], vs[2];
  eigen2(saddle.jac, l1, l2, vu, vs);
  if (!(l1 > 0 && l2 < 0)) throw std::runtime_error("not a hyperbolic saddle");
  FastField ff(sys);
  detail::Rhs rhs = [&ff](double, const double* y, double* dy) {
    dy[0] = ff.p.eval(y[0], y[1]);
    dy[1] = ff.q.eval(y[0], y[1]);
    dy[2] = ff.div.eval(y[0], y[1]);
  };
  double px = saddle.x, py = saddle.y;
  double escape_radius = std::max(10 * offset, 2 * capture_radius);
  for (int branch = 0; branch < 2; ++branch) {
    double sgn = branch == 0 ? 1.0 : -1.0;
    double x0 = px + sgn * offset * vu[0], y0 = py + sgn * offset * vu[1];
    bool left = false, captured = false, escaped = false;
    double capture_t = 0;
    int status = 0;
    auto sol = detail::dp5_integrate(
        rhs, 3, {x0, y0, 0.0}, 0.0, opts.max_time, opts.rel_tol, opts.abs_tol, opts.first_step,
        [&](const detail::StepRecord& rec) {
          double endstate[3];
          dense_eval_step(rec, 3, rec.t0 + rec.h, endstate);
          if (std::abs(endstate[0]) > opts.bbox || std::abs(endstate[1]) > opts.bbox) {
            escaped = true;
            return true;
          }
          double dist = std::hypot(endstate[0] - px, endstate[1] - py);
          if (!left) {
            if (dist > escape_radius) left = true;
            return false;
          }
          if (dist < capture_radius) {
            double ux = endstate[0] - px, uy = endstate[1] - py;
            double ca = (ux * vs[0] + uy * vs[1]) / (dist == 0 ? 1 : dist);
            if (std::abs(ca) > 0.7) {
              captured = true;
              capture_t = rec.t0 + rec.h;
              return true;
            }
          }
          return false;
        },
        status);
    if (!captured) continue;
    Trajectory tr;
    tr.tolerance = opts.rel_tol;
    tr.ts.push_back(0.0);
    tr.xs.push_back(x0);
    tr.ys.push_back(y0);
    tr.divint.push_back(0.0);
    double endstate[3];
    for (const auto& rec : sol.steps) {
      double te = rec.t0 + rec.h;
      if (te > capture_t) te = capture_t;
      dense_eval_step(rec, 3, te, endstate);
      tr.ts.push_back(te);
      tr.xs.push_back(endstate[0]);
      tr.ys.push_back(endstate[1]);
      tr.divint.push_back(endstate[2]);
      if (te >= capture_t) break;
    }
    return tr;
  }
  throw std::runtime_error("no return to saddle");
}

Beta1Result separatrix_quantity_beta1(const PlanarSystem& sys, const Trajectory& loop,
                                      const SingularPoint& saddle, double cut_radius,
                                      const OdeOptions& opts) {
  (void)opts;
  if (std::abs(saddle.divergence_value) > 1e-9)
    throw std::runtime_error("divergent: strong saddle");
  if (loop.size() < 3) throw std::invalid_argument("loop trajectory too short");
  if (loop.divint.size() != loop.ts.size())
    throw std::invalid_argument("loop trajectory lacks divergence integral data");
  double px = saddle.x, py = saddle.y;
  auto dist = [&](size_t i) { return std::hypot(loop.xs[i] - px, loop.ys[i] - py); };
  size_t n = loop.size();
  size_t a = 0;
  while (a < n && dist(a) < cut_radius) ++a;
  size_t b = n - 1;
  while (b > 0 && dist(b) < cut_radius) --b;
  if (a >= b) throw std::invalid_argument("cut radius swallows the loop");
  // linear sub-sample interpolation of the exact cut crossing
  auto interp_w = [&](size_t lo, size_t hi) {
    double d0 = dist(lo), d1 = dist(hi);
    double f = (d1 == d0) ? 0.0 : (cut_radius - d0) / (d1 - d0);
    f = std::clamp(f, 0.0, 1.0);
    return std::array<double, 3>{
        loop.divint[lo] + f * (loop.divint[hi] - loop.divint[lo]),
        loop.xs[lo] + f * (loop.xs[hi] - loop.xs[lo]),
        loop.ys[lo] + f * (loop.ys[hi] - loop.ys[lo])};
  };
  auto wa = (a > 0) ? interp_w(a - 1, a) : std::array<double, 3>{loop.divint[0], loop.xs[0], loop.ys[0]};
  auto wb = interp_w(b, std::min(b + 1, n - 1));
  double value = wb[0] - wa[0];
  // tails from the linearized flow: div = grad(div) . delta + O(|delta|^2)
  RPoly divp = divergence(sys);
  double gx = divp.dx().eval_d(px, py), gy = divp.dy().eval_d(px, py);
  double l1, l2, vu[2], vs[2];
  eigen2(saddle.jac, l1, l2, vu, vs);
  double dux = wa[1] - px, duy = wa[2] - py;
  double dsx = wb[1] - px, dsy = wb[2] - py;
  double tail = (gx * dux + gy * duy) / l1 - (gx * dsx + gy * dsy) / l2;
  value += tail;
  // second-order bound on the discarded remainder
  double hxx = divp.dx().dx().eval_d(px, py), hxy = divp.dx().dy().eval_d(px, py),
         hyy = divp.dy().dy().eval_d(px, py);
  double hnorm = std::abs(hxx) + 2 * std::abs(hxy) + std::abs(hyy);
  double r2 = cut_radius * cut_radius;
  Beta1Result res;
  res.value = value;
  res.tail_estimate = 0.5 * hnorm * r2 * (1.0 / l1 + 1.0 / -l2);
  res.cut_radius = cut_radius;
  return res;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t,x,y\n";
  char buf[96];
  for (size_t i = 0; i < tr.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", tr.ts[i], tr.xs[i], tr.ys[i]);
    os << buf;
  }
  return os.str();
}

std::string map_samples_csv(const std::vector<MapSample>& samples) {
  std::ostringstream os;
  os << "sigma,image,derivative\n";
  char buf[96];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", s.sigma, s.image, s.derivative);
    os << buf;
  }
  return os.str();
}

}  // namespace iif
