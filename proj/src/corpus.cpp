#include "iif/corpus.hpp"

#include <cmath>
#include <stdexcept>

namespace iif {

namespace {

PPoly ppoly(const std::string& expr) { return parse_poly_expr(expr); }

CorpusEntry make_focus_ellipse() {
  CorpusEntry e;
  e.name = "focus_ellipse";
  e.description =
      "cubic family with a strong focus at the origin and an invariant ellipse "
      "1 + m1 x^2 + m1 m2 y^2 = 0 that is a hyperbolic limit cycle for "
      "l != 0, m1 < 0, m1 != -1, m2 > 0";
  e.params = {"l", "m1", "m2"};
  e.system = ParamSystem(
      ppoly("l*x - y + l*m1*x^3 + (m2 - m1 + m1*m2)*x^2*y + l*m1*m2*x*y^2 + m2*y^3"),
      ppoly("x + l*y - x^3 + l*m1*x^2*y + (m1*m2 - m1 - 1)*x*y^2 + l*m1*m2*y^3"));
  e.default_binding = {{"l", Rational(1, 2)}, {"m1", Rational(-2)}, {"m2", Rational(1)}};
  e.iif = ppoly("(x^2 + y^2)*(1 + m1*x^2 + m1*m2*y^2)");
  e.curves = {{"ellipse", ppoly("1 + m1*x^2 + m1*m2*y^2")}, {"focus_factor", ppoly("x^2 + y^2")}};
  e.points = {{"focus", {Rational(0), Rational(0)}}};
  return e;
}

CorpusEntry make_loop_factor() {
  CorpusEntry e;
  e.name = "loop_factor";
  e.description =
      "homoclinic loop inside f = y^2 - (1-x)^2(1+x) through the weak saddle (1,0); "
      "V = (x^2+y^2) f^m has vanishing multiplicity m on the loop (instance g = q = 1, m = 1)";
  PlanarSystem inst = loop_factor(1, RPoly::constant(Rational(1)), RPoly::constant(Rational(1)));
  auto lift = [](const RPoly& p) {
    PPoly r;
    for (const auto& [mono, c] : p.terms) r.add_term(mono.i, mono.j, ParamPoly(c));
    return r;
  };
  e.system = ParamSystem(lift(inst.p), lift(inst.q));
  e.iif = lift(loop_factor_iif(1, RPoly::constant(Rational(1))).v);
  e.curves = {{"loop", lift(loop_factor_curve())}, {"focus_factor", lift(parse_rpoly("x^2 + y^2"))}};
  e.points = {{"saddle", {Rational(1), Rational(0)}}, {"focus", {Rational(0), Rational(0)}}};
  return e;
}

CorpusEntry make_fish() {
  CorpusEntry e;
  e.name = "fish";
  e.description =
      "Hamiltonian with a homoclinic loop inside f = y^2 - x^2 + x^3 through the weak 1:1 "
      "saddle at the origin; V = f^n is an inverse integrating factor for every n";
  e.system = ParamSystem(ppoly("-2*y"), ppoly("-2*x + 3*x^2"));
  e.iif = ppoly("y^2 - x^2 + x^3");
  e.curves = {{"loop", ppoly("y^2 - x^2 + x^3")}};
  e.points = {{"saddle", {Rational(0), Rational(0)}}, {"center", {Rational(2, 3), Rational(0)}}};
  return e;
}

CorpusEntry make_andronov() {
  CorpusEntry e;
  e.name = "andronov_strong_loop";
  e.description =
      "quadratic system with a homoclinic loop inside x^2(1-x) - y^2 = 0 through the strong "
      "1:3 resonant saddle at the origin; no analytic inverse integrating factor exists near "
      "the loop";
  e.system = ParamSystem(ppoly("-x + 2*y + x^2"), ppoly("2*x - y - 3*x^2 + (3/2)*x*y"));
  e.curves = {{"loop", ppoly("x^2 - x^3 - y^2")}};
  e.points = {{"saddle", {Rational(0), Rational(0)}}};
  return e;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = {make_focus_ellipse(), make_loop_factor(),
                                                   make_fish(), make_andronov()};
  return entries;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : corpus())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown corpus system: " + name);
}

PlanarSystem bind_system(const ParamSystem& sys, const std::map<std::string, Rational>& binding) {
  return PlanarSystem(bind_params(sys.p, binding), bind_params(sys.q, binding));
}

IIF bind_iif(const PPoly& v, const std::map<std::string, Rational>& binding) {
  return IIF(bind_params(v, binding));
}

PlanarSystem focus_ellipse(const Rational& l, const Rational& m1, const Rational& m2) {
  const CorpusEntry& e = corpus_entry("focus_ellipse");
  return bind_system(e.system, {{"l", l}, {"m1", m1}, {"m2", m2}});
}

IIF focus_ellipse_iif(const Rational& m1, const Rational& m2) {
  const CorpusEntry& e = corpus_entry("focus_ellipse");
  return bind_iif(*e.iif, {{"l", Rational(0)}, {"m1", m1}, {"m2", m2}});
}

std::shared_ptr<OrbitParam> focus_ellipse_orbit(double m1, double m2) {
  if (!(m1 < 0) || !(m2 > 0)) throw std::invalid_argument("need m1 < 0 and m2 > 0");
  double r1 = 1.0 / std::sqrt(-m1);       // x amplitude sqrt(m2)/sqrt(-m1 m2)
  double r2 = 1.0 / std::sqrt(-m1 * m2);  // y amplitude 1/sqrt(-m1 m2)
  auto fn = [r1, r2](double s, double out[6]) {
    out[0] = r1 * std::cos(s);
    out[1] = r2 * std::sin(s);
    out[2] = -r1 * std::sin(s);
    out[3] = r2 * std::cos(s);
    out[4] = -r1 * std::cos(s);
    out[5] = -r2 * std::sin(s);
  };
  return std::make_shared<ClosedFormOrbit>(fn, 2 * M_PI, true);
}

double focus_ellipse_tilde_v0(double m1, double m2, double n) {
  double sm = std::sqrt(m2);
  return m1 * n * (n - sm) * (n - 2 * sm) / (n * n - 2 * n * sm + m2 + m1 * m2);
}

RPoly loop_factor_curve() { return parse_rpoly("y^2 - (1 - x)^2*(1 + x)"); }

PlanarSystem loop_factor(int m, const RPoly& g, const RPoly& q) {
  if (m < 1) throw std::invalid_argument("multiplicity parameter must be at least 1");
  if (g.is_zero_poly() || q.is_zero_poly()) throw std::invalid_argument("g and q must be nonzero");
  RPoly f = loop_factor_curve();
  RPoly r2 = parse_rpoly("x^2 + y^2");
  RPoly fm1 = f.pow(m - 1), fm = f.pow(m);
  // bracket = (1-m) g + f^{m-1}
  RPoly bracket = g.scaled(Rational(1 - m)) + fm1;
  RPoly x = RPoly::var_x(), y = RPoly::var_y();
  RPoly px = (bracket * f.dy() + f * g.dy()) * r2 * q + fm * ((x + y) * q).scaled(Rational(2)) +
             fm * r2 * q.dy();
  RPoly py = (bracket * f.dx() + f * g.dx()) * r2 * q + fm * ((x - y) * q).scaled(Rational(2)) +
             fm * r2 * q.dx();
  return PlanarSystem(px.scaled(Rational(-1)), py);
}

IIF loop_factor_iif(int m, const RPoly& q) {
  RPoly f = loop_factor_curve();
  RPoly r2 = parse_rpoly("x^2 + y^2");
  return IIF(r2 * f.pow(m) * q, {{r2, 1}, {f, m}}, q);
}

PlanarSystem fish() { return PlanarSystem(parse_rpoly("-2*y"), parse_rpoly("-2*x + 3*x^2")); }

RPoly fish_curve() { return parse_rpoly("y^2 - x^2 + x^3"); }

IIF fish_iif(int n) {
  if (n < 1) throw std::invalid_argument("exponent must be at least 1");
  RPoly f = fish_curve();
  return IIF(f.pow(n), {{f, n}}, RPoly::constant(Rational(1)));
}

PlanarSystem andronov_strong_loop() {
  return PlanarSystem(parse_rpoly("-x + 2*y + x^2"), parse_rpoly("2*x - y - 3*x^2 + (3/2)*x*y"));
}

RPoly andronov_curve() { return parse_rpoly("x^2 - x^3 - y^2"); }

}  // namespace iif
