#pragma once

#include "iif/flow.hpp"
#include "iif/iif.hpp"
#include "iif/system.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace iif {

// Regular parameterized orbit (phi(s), psi(s)) with two derivatives.
// out = {phi, psi, phi', psi', phi'', psi''}.
class OrbitParam {
 public:
  virtual ~OrbitParam() = default;
  virtual double length() const = 0;
  virtual bool periodic() const = 0;
  virtual void eval(double s, double out[6]) const = 0;
};

class ClosedFormOrbit : public OrbitParam {
 public:
  using Fn = std::function<void(double, double[6])>;
  ClosedFormOrbit(Fn fn, double length, bool periodic)
      : fn_(std::move(fn)), length_(length), periodic_(periodic) {}
  double length() const override { return length_; }
  bool periodic() const override { return periodic_; }
  void eval(double s, double out[6]) const override { fn_(s, out); }

 private:
  Fn fn_;
  double length_;
  bool periodic_;
};

// Cubic-spline interpolation of a dense trajectory, reparameterized by arc
// length (periodic spline for closed orbits, natural spline otherwise).
class SplineOrbit : public OrbitParam {
 public:
  SplineOrbit(const std::vector<double>& xs, const std::vector<double>& ys, bool periodic);
  static SplineOrbit from_trajectory(const Trajectory& tr, bool periodic);
  double length() const override { return length_; }
  bool periodic() const override { return periodic_; }
  void eval(double s, double out[6]) const override;

 private:
  struct Spline {
    std::vector<double> u, a, b, c, d;  // piecewise a + b t + c t^2 + d t^3
    double eval(double uu, double* d1 = nullptr, double* d2 = nullptr) const;
  };
  Spline sx_, sy_;
  bool periodic_ = false;
  double u_total_ = 0, length_ = 0;
  std::vector<double> s_table_, u_table_;  // arc length <-> chord parameter
  double u_of_s(double s) const;
};

// The (s,n) chart along a regular orbit:
//   x(s,n) = phi(s) - n psi'(s),  y(s,n) = psi(s) + n phi'(s).
struct CurvilinearFrame {
  std::shared_ptr<const OrbitParam> orbit;
  double tube_radius = 0;

  double length() const { return orbit->length(); }
  bool periodic() const { return orbit->periodic(); }
  void chart(double s, double n, double& x, double& y) const;
  // Euclidean speed |gamma'(s)| at n = 0 (converts section offsets to n).
  double speed(double s) const;
};

// Builds a frame and computes the injectivity tube radius as 0.3 x the
// minimum radius of curvature (optionally capped, e.g. by the distance to
// another invariant set).
CurvilinearFrame make_frame(std::shared_ptr<const OrbitParam> orbit,
                            double radius_cap = std::numeric_limits<double>::infinity());

// Inverts the chart by damped Newton iteration seeded from the nearest orbit
// sample. Throws "outside tubular neighborhood" on failure.
std::pair<double, double> to_curvilinear(const CurvilinearFrame& frame, double x, double y);

struct FrameFields {
  double n_dot = 0;  // N(s,n)
  double s_dot = 0;  // S(s,n)
  double f = 0;      // F = N / S
  double jac = 0;    // J(s,n)
};

FrameFields frame_fields(const CurvilinearFrame& frame, const PlanarSystem& sys, double s,
                         double n);

// d/dn of F(s,n) at fixed s (forward-mode dual-number differentiation).
double frame_f_dn(const CurvilinearFrame& frame, const PlanarSystem& sys, double s, double n);

// The transported scalar Vt(s,n) = V(x(s,n), y(s,n)) / (J(s,n) S(s,n)),
// an inverse integrating factor of dn/ds = F(s,n).
double tilde_v(const CurvilinearFrame& frame, const PlanarSystem& sys, const RPoly& v, double s,
               double n);

struct MultiplicityEstimate {
  int m = 0;
  std::vector<std::pair<double, double>> leading_coeff_samples;  // (s, v(s))
  double fit_residual = 0;
};

// Least-squares slope of log|V| against log n over a geometric n-grid at each
// s sample; the common rounded slope is the vanishing multiplicity.
MultiplicityEstimate numeric_multiplicity(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                          const RPoly& v, const std::vector<double>& s_samples,
                                          double n_lo = 1e-4, double n_hi = 1e-2,
                                          int n_count = 12);

// Max relative residual of Vt(L, Pi(sigma)) = Vt(0, sigma) Pi'(sigma) over a
// grid of chart offsets sigma > 0.
double verify_transition_identity(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                  const RPoly& v, const std::vector<double>& sigma_grid,
                                  const OdeOptions& opts = {});

// Invariance of Vt along solutions of dn/ds = F: the ratio
// Vt(s, n(s)) / exp(int_0^s dF/dn) stays constant; returns max relative drift.
double tilde_v_transport_invariant(const CurvilinearFrame& frame, const PlanarSystem& sys,
                                   const RPoly& v, double n0, double s_end);

// Residual of the closed-form implicit return-map identity for the cubic
// limit-cycle family carrying the ellipse: with R(u) = |u(u-2*sqrt(m2))|^((1+m1)/2)
// / |u - sqrt(m2)|^m1, checks R(pi_value) = k0 R(sigma). Returns the relative
// residual.
double implicit_poincare_check(double sigma, double pi_value, double lambda, double m1, double m2,
                               double k0);

}  // namespace iif
