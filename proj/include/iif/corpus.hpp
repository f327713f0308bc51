#pragma once

#include "iif/curvilinear.hpp"
#include "iif/iif.hpp"
#include "iif/parampoly.hpp"
#include "iif/system.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iif {

// Built-in example systems exercised by the test suite and the `corpus` CLI
// subcommand. Parametric entries carry symbolic parameters; the instances
// listed in `default_binding` reproduce the reference configurations.
struct CorpusEntry {
  std::string name;
  std::string description;
  ParamSystem system;
  std::vector<std::string> params;
  std::map<std::string, Rational> default_binding;
  std::optional<PPoly> iif;
  std::map<std::string, PPoly> curves;
  std::map<std::string, std::pair<Rational, Rational>> points;
};

const std::vector<CorpusEntry>& corpus();
const CorpusEntry& corpus_entry(const std::string& name);

// Cubic family with a strong focus at the origin and the invariant ellipse
// 1 + m1 x^2 + m1 m2 y^2 = 0 (a hyperbolic limit cycle for l != 0, m1 < 0,
// m1 != -1, m2 > 0); V = (x^2+y^2)(1 + m1 x^2 + m1 m2 y^2).
PlanarSystem focus_ellipse(const Rational& l, const Rational& m1, const Rational& m2);
IIF focus_ellipse_iif(const Rational& m1, const Rational& m2);

// The invariant ellipse parameterized by angle, matching the chart
// x = (sqrt(m2) - n) cos(s)/sqrt(-m1 m2), y = (1 - sqrt(m2) n) sin(s)/sqrt(-m1 m2).
std::shared_ptr<OrbitParam> focus_ellipse_orbit(double m1, double m2);

// Closed form of the transported factor on the s = 0 section of that chart.
double focus_ellipse_tilde_v0(double m1, double m2, double n);

// Homoclinic-loop family built from f = y^2 - (1-x)^2 (1+x) (oval with a
// double point at the weak saddle (1,0)) and free polynomials g, q:
// V = (x^2+y^2) f^m q has vanishing multiplicity m on the loop.
PlanarSystem loop_factor(int m, const RPoly& g, const RPoly& q);
IIF loop_factor_iif(int m, const RPoly& q);
RPoly loop_factor_curve();

// Hamiltonian fish: dx = -2y, dy = -2x + 3x^2, loop inside f = y^2 - x^2 + x^3
// through the weak 1:1 saddle at the origin; V = f^n for every n >= 1.
PlanarSystem fish();
RPoly fish_curve();
IIF fish_iif(int n);

// Quadratic system with a homoclinic loop through the strong 1:3 resonant
// saddle at the origin, inside x^2 (1-x) - y^2 = 0.
PlanarSystem andronov_strong_loop();
RPoly andronov_curve();

// Instantiation helpers.
PlanarSystem bind_system(const ParamSystem& sys, const std::map<std::string, Rational>& binding);
IIF bind_iif(const PPoly& v, const std::map<std::string, Rational>& binding);

}  // namespace iif
