#include "iif/corpus.hpp"
#include "iif/iif.hpp"
#include "iif/job.hpp"
#include "iif/parampoly.hpp"
#include "iif/saddle.hpp"
#include "iif/system.hpp"
#include "iif/verdict.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

using namespace iif;

std::map<std::string, Rational> binding_of(const std::map<std::string, std::string>& params) {
  std::map<std::string, Rational> b;
  for (const auto& [k, v] : params) b[k] = parse_rational(v);
  return b;
}

PlanarSystem system_of(const std::string& p, const std::string& q,
                       const std::map<std::string, std::string>& params) {
  auto b = binding_of(params);
  return PlanarSystem(bind_params(parse_poly_expr(p), b), bind_params(parse_poly_expr(q), b));
}

SaddleInfo saddle_of(const PlanarSystem& sys, const std::string& x, const std::string& y) {
  return classify_saddle(sys, verify_singular(sys, parse_rational(x), parse_rational(y)));
}

std::string residual_expr(const std::string& p, const std::string& q, const std::string& v) {
  ParamSystem sys(parse_poly_expr(p), parse_poly_expr(q));
  return poly_to_string(verify_iif(sys, parse_poly_expr(v)));
}

bool verify_iif_expr(const std::string& p, const std::string& q, const std::string& v) {
  ParamSystem sys(parse_poly_expr(p), parse_poly_expr(q));
  return verify_iif(sys, parse_poly_expr(v)).is_zero_poly();
}

int multiplicity_expr(const std::string& v, const std::string& f,
                      const std::map<std::string, std::string>& params) {
  auto b = binding_of(params);
  return symbolic_multiplicity(bind_params(parse_poly_expr(v), b),
                               bind_params(parse_poly_expr(f), b));
}

py::dict classify_expr(const std::string& p, const std::string& q, const std::string& x,
                       const std::string& y, const std::map<std::string, std::string>& params) {
  PlanarSystem sys = system_of(p, q, params);
  SaddleInfo info = saddle_of(sys, x, y);
  py::dict d;
  d["lambda"] = info.lambda;
  d["mu"] = info.mu;
  d["ratio_r"] = info.ratio_r;
  d["strong"] = info.strong;
  d["rational_eigenvalues"] = info.rational_eigenvalues;
  if (info.resonance) d["resonance"] = py::make_tuple(info.resonance->first, info.resonance->second);
  return d;
}

py::dict saddle_quantities_expr(const std::string& p, const std::string& q, const std::string& x,
                                const std::string& y, int K,
                                const std::map<std::string, std::string>& params) {
  PlanarSystem sys = system_of(p, q, params);
  SaddleInfo info = saddle_of(sys, x, y);
  SaddleQuantities sq = saddle_quantities(sys, info, K);
  py::dict d;
  std::vector<std::string> alphas;
  for (const QuadExt& a : sq.alphas) alphas.push_back(to_string(a));
  d["alphas"] = alphas;
  if (sq.first_nonzero) d["first_nonzero"] = *sq.first_nonzero;
  d["report"] = sq.report;
  return d;
}

py::dict normal_form_expr(const std::string& p, const std::string& q, const std::string& x,
                          const std::string& y, int degree,
                          const std::map<std::string, std::string>& params) {
  PlanarSystem sys = system_of(p, q, params);
  SaddleInfo info = saddle_of(sys, x, y);
  ResonantNormalForm nf = resonant_normal_form(sys, info, degree, std::max(degree, 20));
  py::dict d;
  d["p"] = nf.p;
  d["q"] = nf.q;
  d["delta"] = nf.delta;
  d["ell"] = nf.ell;
  if (nf.a_available) d["a"] = to_string(nf.a_coeff);
  std::vector<std::string> c;
  for (const QuadExt& ck : nf.c) c.push_back(to_string(ck));
  d["c"] = c;
  d["truncation_degree"] = nf.truncation_degree;
  d["existence_obstruction"] = existence_obstruction(info, nf);
  return d;
}

py::dict cyclicity_expr(const std::string& p, const std::string& q, const std::string& x,
                        const std::string& y, int m,
                        const std::map<std::string, std::string>& params) {
  PlanarSystem sys = system_of(p, q, params);
  SaddleInfo info = saddle_of(sys, x, y);
  std::optional<SaddleQuantities> sq;
  if (!info.strong) sq = saddle_quantities(sys, info, std::max(m, 1));
  CyclicityVerdict cv = homoclinic_cyclicity(m, info, sq);
  py::dict d;
  d["m"] = cv.m;
  d["cyclicity"] = cv.cyclicity;
  d["branch"] = cv.branch;
  d["rule"] = cv.rule;
  d["text"] = cv.to_text();
  return d;
}

std::string run_job_text(const std::string& text, double tol, int max_degree, unsigned seed,
                         const std::string& out_dir) {
  JobOptions opts;
  opts.tol = tol;
  opts.max_degree = max_degree;
  opts.seed = seed;
  opts.out_dir = out_dir;
  return run_job(parse_job_text(text), opts).to_json();
}

std::string run_builtin(const std::string& name, double tol, int max_degree, unsigned seed) {
  JobOptions opts;
  opts.tol = tol;
  opts.max_degree = max_degree;
  opts.seed = seed;
  return run_job(builtin_job(name), opts).to_json();
}

}  // namespace

PYBIND11_MODULE(_iifcycles, mod) {
  mod.doc() =
      "planar polynomial vector fields: inverse integrating factors, return maps, "
      "saddle quantities, cyclicity verdicts";
  mod.def("verify_iif", &verify_iif_expr, py::arg("p"), py::arg("q"), py::arg("v"),
          "True iff X V - V div X is the exact zero polynomial (symbols allowed)");
  mod.def("iif_residual", &residual_expr, py::arg("p"), py::arg("q"), py::arg("v"),
          "The polynomial X V - V div X as a string");
  mod.def("multiplicity", &multiplicity_expr, py::arg("v"), py::arg("f"),
          py::arg("params") = std::map<std::string, std::string>{},
          "Largest m with f^m dividing v exactly");
  mod.def("classify_saddle", &classify_expr, py::arg("p"), py::arg("q"), py::arg("x"),
          py::arg("y"), py::arg("params") = std::map<std::string, std::string>{},
          "Eigenvalues, hyperbolicity ratio and resonance of a saddle (exact rational point)");
  mod.def("saddle_quantities", &saddle_quantities_expr, py::arg("p"), py::arg("q"), py::arg("x"),
          py::arg("y"), py::arg("K") = 3,
          py::arg("params") = std::map<std::string, std::string>{},
          "Saddle quantities alpha_1..alpha_{K+1} of a weak saddle, as exact strings");
  mod.def("resonant_normal_form", &normal_form_expr, py::arg("p"), py::arg("q"), py::arg("x"),
          py::arg("y"), py::arg("degree") = 9,
          py::arg("params") = std::map<std::string, std::string>{},
          "Formal orbital normal form at a p:q resonant saddle");
  mod.def("homoclinic_cyclicity", &cyclicity_expr, py::arg("p"), py::arg("q"), py::arg("x"),
          py::arg("y"), py::arg("m"), py::arg("params") = std::map<std::string, std::string>{},
          "Cyclicity verdict for a homoclinic loop with loop multiplicity m");
  mod.def("run_job", &run_job_text, py::arg("text"), py::arg("tol") = 1e-6,
          py::arg("max_degree") = 15, py::arg("seed") = 1, py::arg("out_dir") = std::string(),
          "Run a JSON job and return the JSON report");
  mod.def("builtin_job_names", &builtin_job_names, "Names of the built-in example jobs");
  mod.def("run_builtin_job", &run_builtin, py::arg("name"), py::arg("tol") = 1e-6,
          py::arg("max_degree") = 15, py::arg("seed") = 1,
          "Run a built-in example job and return the JSON report");
}
