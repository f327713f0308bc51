#pragma once

#include "iif/system.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace iif {

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_time = 1e4;       // forward-time budget per call
  double bbox = 10.0;          // |x|,|y| bound; leaving it aborts with an error
  double first_step = 1e-4;
  double sigma_max = 1.0;      // widest accepted |section offset| for event hits
};

struct EventHit {
  double t = 0;
  double x = 0, y = 0;
  double sigma = 0;        // offset along the section direction
  int section_index = 0;   // index into the sections list passed to integrate
};

struct Trajectory {
  std::vector<double> ts, xs, ys;
  std::vector<double> divint;  // running integral of div X along the orbit
  double tolerance = 0;
  std::vector<EventHit> hits;

  size_t size() const { return ts.size(); }
};

// Transversal section: the ray/line {base + sigma * direction}. `half`
// selects which signed side of sigma the section denotes (+1, -1, or 0 for
// both). Construction rejects singular base points and tangential directions.
struct Section {
  double bx = 0, by = 0;
  double dx = 1, dy = 0;  // unit direction (the sigma axis)
  int half = +1;

  static Section make(const PlanarSystem& sys, double bx, double by, double dx, double dy,
                      int half = +1);

  // Signed distance of (x,y) to the section line (zero on the line).
  double line_dist(double x, double y) const {
    return -(x - bx) * dy + (y - by) * dx;
  }
  double offset(double x, double y) const { return (x - bx) * dx + (y - by) * dy; }
  bool offset_in_half(double sigma, double slack = 1e-12) const {
    if (half > 0) return sigma >= -slack;
    if (half < 0) return sigma <= slack;
    return true;
  }
};

struct MapSample {
  double sigma = 0;
  double image = 0;
  double derivative = 0;  // > 0 for orientation-preserving planar transitions
  double time = 0;        // transition time (diagnostic)
};

// Adaptive Dormand-Prince 5(4) integration with dense output. Event hits on
// the given sections are located by sign change of the line distance plus
// root polishing on the dense interpolant; the trajectory does not stop at
// hits. A section crossing at the initial point is ignored until the orbit
// has left the section once (arming).
Trajectory integrate(const PlanarSystem& sys, double x0, double y0, double t_end,
                     const OdeOptions& opts = {}, const std::vector<Section>& sections = {});

// First-hit transition map between two sections with the derivative obtained
// from the co-integrated variational equations (never finite differences).
MapSample transition_map(const PlanarSystem& sys, const Section& from, const Section& to,
                         double sigma, const OdeOptions& opts = {});

// Integral of div X over one period of the periodic orbit through cycle_start.
double characteristic_exponent(const PlanarSystem& sys, double cx, double cy,
                               const Section& section, const OdeOptions& opts = {});

// Follows the unstable separatrix of a hyperbolic saddle until it re-enters
// capture_radius along the stable direction; returns the regular loop part.
Trajectory trace_homoclinic(const PlanarSystem& sys, const SingularPoint& saddle, double offset,
                            double capture_radius, const OdeOptions& opts = {});

struct Beta1Result {
  double value = 0;           // integral of div X along the regular loop part
  double tail_estimate = 0;   // linearized-flow estimate of the truncated tails
  double cut_radius = 0;
};

// Separatrix quantity beta_1 = loop integral of div X dt, defined only when
// the divergence vanishes at the saddle.
Beta1Result separatrix_quantity_beta1(const PlanarSystem& sys, const Trajectory& loop,
                                      const SingularPoint& saddle, double cut_radius,
                                      const OdeOptions& opts = {});

// CSV exports (header row; fixed formatting for deterministic reports).
std::string trajectory_csv(const Trajectory& tr);
std::string map_samples_csv(const std::vector<MapSample>& samples);

namespace detail {
// Generic dense-output integrator used by flow and curvilinear code.
// rhs(t, y, dydt) with state dimension n.
using Rhs = std::function<void(double, const double*, double*)>;

struct StepRecord {
  double t0, h;
  std::vector<double> y0;
  std::vector<double> k;  // 7 stages * n, row-major
};

struct DenseSolution {
  int n = 0;
  std::vector<StepRecord> steps;
  void eval(double t, double* out) const;
  double t_end() const;
};

// Integrates until t_end or stop() returns true after a step. Returns the
// dense solution; `status`: 0 done, 1 stopped by callback, 2 step underflow.
DenseSolution dp5_integrate(const Rhs& rhs, int n, const std::vector<double>& y0, double t0,
                            double t_end, double rel_tol, double abs_tol, double first_step,
                            const std::function<bool(const StepRecord&)>& after_step, int& status);
}  // namespace detail

}  // namespace iif
