#include "iif/job.hpp"

#include "iif/corpus.hpp"
#include "iif/curvilinear.hpp"
#include "iif/flow.hpp"
#include "iif/saddle.hpp"
#include "iif/verdict.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace iif {

namespace {

using njson = nlohmann::ordered_json;

const std::set<std::string> kKnownKinds = {
    "verify-iif", "poincare",    "identity-check", "multiplicity",
    "saddle",     "normal-form", "verdict",        "perturb",
    "trace-homoclinic"};

[[noreturn]] void field_error(const std::string& path, const std::string& why) {
  throw std::invalid_argument(path + ": " + why);
}

Rational json_rat(const njson& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      field_error(path, e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long long>());
  field_error(path, "expected an exact rational (\"num/den\" string or integer)");
}

ParamPoly json_coeff(const njson& v, const std::string& path) {
  if (v.is_number_integer()) return ParamPoly(Rational(v.get<long long>()));
  if (!v.is_string()) field_error(path, "expected a coefficient string or integer");
  PPoly e;
  try {
    e = parse_poly_expr(v.get<std::string>());
  } catch (const std::exception& ex) {
    field_error(path, ex.what());
  }
  ParamPoly c;
  for (const auto& [m, coeff] : e.terms) {
    if (m.i != 0 || m.j != 0) field_error(path, "coefficient must not contain x or y");
    c = coeff;
  }
  return c;
}

PPoly json_poly(const njson& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return parse_poly_expr(v.get<std::string>());
    } catch (const std::exception& e) {
      field_error(path, e.what());
    }
  }
  if (!v.is_array()) field_error(path, "expected an expression string or [i, j, coeff] triples");
  PPoly p;
  int idx = 0;
  for (const auto& t : v) {
    std::string tp = path + "[" + std::to_string(idx++) + "]";
    if (!t.is_array() || t.size() != 3) field_error(tp, "expected an [i, j, coeff] triple");
    if (!t[0].is_number_integer() || !t[1].is_number_integer())
      field_error(tp, "exponents must be integers");
    int i = t[0].get<int>(), j = t[1].get<int>();
    if (i < 0 || j < 0) field_error(tp, "exponents must be nonnegative");
    p.add_term(i, j, json_coeff(t[2], tp + "[2]"));
  }
  return p;
}

void collect_params(const PPoly& p, std::set<std::string>& out) {
  for (const auto& [m, c] : p.terms)
    for (const auto& [pm, r] : c.terms)
      for (const auto& [name, e] : pm) out.insert(name);
}

void validate_task(const TaskSpec& t, const AnalysisJob& job, const std::string& path) {
  if (!kKnownKinds.count(t.kind)) field_error(path + ".task", "unknown task kind: " + t.kind);
  for (const char* key : {"point", "saddle", "start", "center"}) {
    auto it = t.names.find(key);
    if (it != t.names.end() && !job.points.count(it->second))
      field_error(path + "." + key, "unknown point: " + it->second);
  }
  auto it = t.names.find("curve");
  if (it != t.names.end() && !job.curves.count(it->second))
    field_error(path + ".curve", "unknown curve: " + it->second);
  auto check_range = [&](const char* key, double lo, double hi) {
    auto n = t.nums.find(key);
    if (n != t.nums.end() && !(n->second >= lo && n->second <= hi))
      field_error(path + "." + key,
                  "out of bounds [" + format_double(lo) + ", " + format_double(hi) + "]");
  };
  check_range("degree", 2, 40);
  check_range("K", 1, 8);
  check_range("count", 1, 10000);
  check_range("samples", 1, 10000);
  check_range("m", 0, 64);
  check_range("n", 1, 16);
}

double num_or(const TaskSpec& t, const std::string& key, double dflt) {
  auto it = t.nums.find(key);
  return it == t.nums.end() ? dflt : it->second;
}

int inum_or(const TaskSpec& t, const std::string& key, int dflt) {
  return static_cast<int>(std::lround(num_or(t, key, dflt)));
}

bool has_num(const TaskSpec& t, const std::string& key) { return t.nums.count(key) != 0; }

std::string name_or(const TaskSpec& t, const std::string& key, const std::string& dflt) {
  auto it = t.names.find(key);
  return it == t.names.end() ? dflt : it->second;
}

void put(TaskRecord& rec, const std::string& key, const std::string& value) {
  rec.fields.emplace_back(key, value);
}
void put(TaskRecord& rec, const std::string& key, double value) {
  rec.fields.emplace_back(key, format_double(value));
}
void put(TaskRecord& rec, const std::string& key, int value) {
  rec.fields.emplace_back(key, std::to_string(value));
}

void write_artifact(const JobOptions& opts, TaskRecord& rec, const std::string& stem,
                    const std::string& content) {
  if (opts.out_dir.empty()) return;
  std::filesystem::create_directories(opts.out_dir);
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%02d", rec.index);
  std::string name = std::string(prefix) + "-" + rec.task + "-" + stem + ".csv";
  std::ofstream out(std::filesystem::path(opts.out_dir) / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact: " + name);
  out << content;
  put(rec, "artifact", name);
}

OdeOptions ode_options(const TaskSpec& t) {
  OdeOptions oo;
  double tol = num_or(t, "ode_tol", 0);
  if (tol > 0) oo.rel_tol = oo.abs_tol = tol;
  if (has_num(t, "max_time")) oo.max_time = num_or(t, "max_time", oo.max_time);
  if (has_num(t, "bbox")) oo.bbox = num_or(t, "bbox", oo.bbox);
  return oo;
}

SingularPoint exact_point(const AnalysisJob& job, const PlanarSystem& sys,
                          const std::string& name) {
  auto [px, py] = job.point(name);
  return verify_singular(sys, px, py);
}

// --- orbit acquisition shared by multiplicity / identity-check -------------

struct OrbitAcquisition {
  CurvilinearFrame frame;
  bool periodic = false;
  double period = 0;  // return time of the traced cycle, when applicable
  std::string how;
};

OrbitAcquisition cycle_frame(const PlanarSystem& sys, double x0, double y0, const OdeOptions& oo,
                             double settle_time) {
  double px = sys.p.eval_d(x0, y0), py = sys.q.eval_d(x0, y0);
  double speed = std::hypot(px, py);
  if (speed < 1e-12) throw std::runtime_error("cycle start point is singular");
  Section sec = Section::make(sys, x0, y0, -py / speed, px / speed, 0);
  Trajectory tr = integrate(sys, x0, y0, std::min(settle_time, oo.max_time), oo, {sec});
  if (tr.hits.size() < 2) throw std::runtime_error("orbit does not return to the section");
  const EventHit& ha = tr.hits[tr.hits.size() - 2];
  const EventHit& hb = tr.hits.back();
  OrbitAcquisition acq;
  acq.periodic = true;
  acq.period = hb.t - ha.t;
  Trajectory loop = integrate(sys, ha.x, ha.y, acq.period, oo);
  auto orbit = std::make_shared<SplineOrbit>(SplineOrbit::from_trajectory(loop, true));
  acq.frame = make_frame(orbit);
  acq.how = "traced cycle, closure defect " + format_double(std::abs(hb.sigma - ha.sigma));
  return acq;
}

OrbitAcquisition acquire_orbit(const AnalysisJob& job, const PlanarSystem& sys, const TaskSpec& t,
                               const OdeOptions& oo) {
  std::string named_orbit = name_or(t, "orbit", "");
  if (named_orbit == "focus-ellipse") {
    auto m1i = job.params.find("m1"), m2i = job.params.find("m2");
    if (m1i == job.params.end() || m2i == job.params.end())
      throw std::invalid_argument("focus-ellipse orbit needs params m1, m2");
    OrbitAcquisition acq;
    acq.periodic = true;
    acq.frame = make_frame(focus_ellipse_orbit(to_double(m1i->second), to_double(m2i->second)));
    acq.how = "closed-form invariant ellipse";
    return acq;
  }
  if (!named_orbit.empty()) throw std::invalid_argument("unknown orbit: " + named_orbit);
  if (t.names.count("saddle")) {
    SingularPoint sp = exact_point(job, sys, t.names.at("saddle"));
    Trajectory tr = trace_homoclinic(sys, sp, num_or(t, "offset", 1e-6),
                                     num_or(t, "capture_radius", 0.05), oo);
    OrbitAcquisition acq;
    acq.periodic = false;
    auto orbit = std::make_shared<SplineOrbit>(SplineOrbit::from_trajectory(tr, false));
    acq.frame = make_frame(orbit);
    acq.how = "traced homoclinic loop (regular part)";
    return acq;
  }
  double x0, y0;
  if (t.names.count("start")) {
    auto [px, py] = job.point(t.names.at("start"));
    x0 = to_double(px);
    y0 = to_double(py);
  } else if (has_num(t, "x") && has_num(t, "y")) {
    x0 = num_or(t, "x", 0);
    y0 = num_or(t, "y", 0);
  } else {
    throw std::invalid_argument("task needs an orbit: start/x,y, saddle, or orbit name");
  }
  return cycle_frame(sys, x0, y0, oo, num_or(t, "settle_time", 100.0));
}

std::vector<double> interior_samples(const OrbitAcquisition& acq, int count) {
  std::vector<double> s;
  double L = acq.frame.length();
  if (acq.periodic) {
    for (int i = 0; i < count; ++i) s.push_back(L * i / count);
  } else {
    for (int i = 0; i < count; ++i) s.push_back(L * (0.15 + 0.7 * i / std::max(1, count - 1)));
  }
  return s;
}

// --- task runners -----------------------------------------------------------

void run_verify_iif(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                    TaskRecord& rec) {
  rec.rule = "inverse integrating factor PDE: X V = V div X";
  if (!job.iif) throw std::invalid_argument("job has no iif section");
  PPoly residual = verify_iif(job.system, *job.iif);
  bool symbolic_ok = residual.is_zero_poly();
  put(rec, "symbolic_residual", symbolic_ok ? "0" : poly_to_string(residual));
  std::vector<std::string> params = job.free_params();
  if (!params.empty()) {
    int samples = inum_or(t, "samples", 8);
    bool sampled = verify_iif_sampled(job.system, *job.iif, params, opts.seed, samples);
    put(rec, "sampled_tuples", samples);
    put(rec, "sampled_agrees", sampled ? "yes" : "no");
    rec.ok = symbolic_ok && sampled;
  } else {
    rec.ok = symbolic_ok;
  }
}

void run_poincare(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                  TaskRecord& rec) {
  rec.rule = "Poincare return map with variational derivative";
  PlanarSystem sys = job.bound_system();
  OdeOptions oo = ode_options(t);
  double bx, by;
  if (t.names.count("point")) {
    auto [px, py] = job.point(t.names.at("point"));
    bx = to_double(px);
    by = to_double(py);
  } else {
    bx = num_or(t, "x", 0);
    by = num_or(t, "y", 0);
  }
  double dx = num_or(t, "dx", 1), dy = num_or(t, "dy", 0);
  Section sec = Section::make(sys, bx, by, dx, dy, static_cast<int>(num_or(t, "half", 1)));
  int count = inum_or(t, "count", 10);
  double smax = num_or(t, "sigma_max", 0.2);
  double smin = num_or(t, "sigma_min", smax / count);
  std::vector<MapSample> samples;
  double max_dev = 0;
  for (int i = 0; i < count; ++i) {
    double sg = count == 1 ? smin : smin + (smax - smin) * i / (count - 1);
    MapSample ms = transition_map(sys, sec, sec, sg, oo);
    max_dev = std::max(max_dev, std::abs(ms.image - ms.sigma));
    samples.push_back(ms);
  }
  put(rec, "samples", count);
  put(rec, "sigma_min", smin);
  put(rec, "sigma_max", smax);
  put(rec, "max_deviation", max_dev);
  put(rec, "derivative_at_sigma_min", samples.front().derivative);
  rec.ok = true;
  if (has_num(t, "implicit_k0")) {
    auto need = [&](const char* p) {
      auto it = job.params.find(p);
      if (it == job.params.end())
        throw std::invalid_argument(std::string("implicit map check needs param ") + p);
      return to_double(it->second);
    };
    double l = need("l"), m1 = need("m1"), m2 = need("m2");
    double scale = std::sqrt(-m1 * m2);  // chart offset per unit section offset
    double k0 = num_or(t, "implicit_k0", 0);
    double worst = 0;
    for (const MapSample& ms : samples)
      worst = std::max(worst,
                       implicit_poincare_check(scale * ms.sigma, scale * ms.image, l, m1, m2, k0));
    double itol = num_or(t, "implicit_tol", 1e-5);
    put(rec, "implicit_residual", worst);
    put(rec, "implicit_tol", itol);
    rec.ok = rec.ok && worst < itol;
  }
  write_artifact(opts, rec, "map_samples", map_samples_csv(samples));
}

void run_identity_check(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                        TaskRecord& rec) {
  rec.rule = "transition identity for the transported factor";
  PlanarSystem sys = job.bound_system();
  std::optional<IIF> v = job.bound_iif();
  if (!v) throw std::invalid_argument("job has no iif section");
  OdeOptions oo = ode_options(t);
  if (!has_num(t, "ode_tol")) {
    // The identity compares quantities of size Pi(sigma) ~ sigma * exp(beta_1);
    // strongly contracting cycles need the image resolved near machine precision.
    oo.rel_tol = 1e-14;
    oo.abs_tol = 1e-14;
  }
  OrbitAcquisition acq = acquire_orbit(job, sys, t, oo);
  if (!acq.periodic) throw std::invalid_argument("identity check needs a closed orbit");
  int count = inum_or(t, "count", 20);
  double smax = num_or(t, "sigma_max", 0.2);
  std::vector<double> grid;
  for (int i = 1; i <= count; ++i) grid.push_back(smax * i / count);
  double residual = verify_transition_identity(acq.frame, sys, v->v, grid, oo);
  double tol = num_or(t, "tol", opts.tol);
  put(rec, "orbit", acq.how);
  put(rec, "sigma_count", count);
  put(rec, "sigma_max", smax);
  put(rec, "max_rel_residual", residual);
  put(rec, "tol", tol);
  rec.ok = residual < tol;
  if (!opts.out_dir.empty()) {
    std::ostringstream csv;
    csv << "sigma,vt0\n";
    for (double sg : grid)
      csv << format_double(sg) << "," << format_double(tilde_v(acq.frame, sys, v->v, 0.0, sg))
          << "\n";
    write_artifact(opts, rec, "vt_section", csv.str());
  }
}

void run_multiplicity(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                      TaskRecord& rec) {
  rec.rule = "vanishing multiplicity of V along the orbit";
  PlanarSystem sys = job.bound_system();
  std::optional<IIF> v = job.bound_iif();
  if (!v) throw std::invalid_argument("job has no iif section");
  OdeOptions oo = ode_options(t);
  OrbitAcquisition acq = acquire_orbit(job, sys, t, oo);
  int count = inum_or(t, "count", 20);
  std::vector<double> s_samples = interior_samples(acq, count);
  MultiplicityEstimate est =
      numeric_multiplicity(acq.frame, sys, v->v, s_samples, num_or(t, "n_lo", 1e-4),
                           num_or(t, "n_hi", 1e-2), inum_or(t, "n_count", 12));
  put(rec, "orbit", acq.how);
  put(rec, "numeric_m", est.m);
  put(rec, "fit_residual", est.fit_residual);
  double min_lead = std::numeric_limits<double>::infinity();
  for (const auto& [s, vs] : est.leading_coeff_samples)
    min_lead = std::min(min_lead, std::abs(vs));
  put(rec, "min_leading_coeff", min_lead);
  rec.ok = min_lead > 0;
  if (t.names.count("curve")) {
    RPoly f = job.bound_curve(t.names.at("curve"));
    int sym = symbolic_multiplicity(v->v, f);
    put(rec, "symbolic_m", sym);
    rec.ok = rec.ok && est.m == sym;
  }
  if (has_num(t, "expect_m")) {
    int expect = inum_or(t, "expect_m", 0);
    put(rec, "expect_m", expect);
    rec.ok = rec.ok && est.m == expect;
  }
  if (!opts.out_dir.empty()) {
    std::ostringstream csv;
    csv << "s,leading_coeff\n";
    for (const auto& [s, vs] : est.leading_coeff_samples)
      csv << format_double(s) << "," << format_double(vs) << "\n";
    write_artifact(opts, rec, "leading_coeff", csv.str());
    std::ostringstream grid;
    grid << "s,n,vt\n";
    for (double s : s_samples)
      for (int k = 0; k < 8; ++k) {
        double n = num_or(t, "n_hi", 1e-2) * std::pow(0.5, k);
        grid << format_double(s) << "," << format_double(n) << ","
             << format_double(tilde_v(acq.frame, sys, v->v, s, n)) << "\n";
      }
    write_artifact(opts, rec, "vt_grid", grid.str());
  }
}

void run_trace_homoclinic(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                          TaskRecord& rec) {
  rec.rule = "separatrix continuation to a saddle connection";
  PlanarSystem sys = job.bound_system();
  OdeOptions oo = ode_options(t);
  std::string pname = name_or(t, "saddle", name_or(t, "point", ""));
  if (pname.empty()) throw std::invalid_argument("trace-homoclinic needs a saddle point name");
  SingularPoint sp = exact_point(job, sys, pname);
  Trajectory tr = trace_homoclinic(sys, sp, num_or(t, "offset", 1e-6),
                                   num_or(t, "capture_radius", 0.05), oo);
  double ex = tr.xs.back() - sp.x, ey = tr.ys.back() - sp.y;
  put(rec, "points", static_cast<int>(tr.size()));
  put(rec, "time_span", tr.ts.back() - tr.ts.front());
  put(rec, "end_distance_to_saddle", std::hypot(ex, ey));
  put(rec, "divergence_integral", tr.divint.back());
  rec.ok = true;
  write_artifact(opts, rec, "orbit", trajectory_csv(tr));
}

void run_saddle(const AnalysisJob& job, const TaskSpec& t, const JobOptions&, TaskRecord& rec) {
  rec.rule = "saddle quantities from the Poincare-Dulac normal form";
  PlanarSystem sys = job.bound_system();
  SaddleInfo info = classify_saddle(sys, exact_point(job, sys, name_or(t, "point", "saddle")));
  put(rec, "lambda", info.lambda);
  put(rec, "mu", info.mu);
  put(rec, "ratio_r", info.ratio_r);
  put(rec, "type", info.strong ? "strong" : "weak");
  if (info.resonance)
    put(rec, "resonance",
        std::to_string(info.resonance->first) + ":" + std::to_string(info.resonance->second));
  rec.ok = true;
  if (t.names.count("expect_resonance")) {
    std::string want = t.names.at("expect_resonance");
    std::string got = info.resonance ? std::to_string(info.resonance->first) + ":" +
                                           std::to_string(info.resonance->second)
                                     : "none";
    rec.ok = rec.ok && got == want;
  }
  if (has_num(t, "expect_strong"))
    rec.ok = rec.ok && info.strong == (num_or(t, "expect_strong", 0) != 0);
  if (info.strong) {
    put(rec, "note", "strong saddle: quantities beyond alpha_1 are undefined");
    if (info.exact_jac)
      put(rec, "alpha_1", to_string(info.exact_jac->trace));
    else
      put(rec, "alpha_1", info.lambda + info.mu);
    return;
  }
  int K = inum_or(t, "K", 3);
  SaddleQuantities sq = saddle_quantities(sys, info, K);
  for (size_t k = 0; k < sq.alphas.size(); ++k)
    put(rec, "alpha_" + std::to_string(k + 1), to_string(sq.alphas[k]));
  put(rec, "first_nonzero",
      sq.first_nonzero ? std::to_string(*sq.first_nonzero) : std::string("none"));
  if (has_num(t, "expect_all_zero"))
    rec.ok = rec.ok && !sq.first_nonzero.has_value();
}

void run_normal_form(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                     TaskRecord& rec) {
  rec.rule = "resonant orbital normal form";
  PlanarSystem sys = job.bound_system();
  SaddleInfo info = classify_saddle(sys, exact_point(job, sys, name_or(t, "point", "saddle")));
  int degree = inum_or(t, "degree", opts.max_degree);
  ResonantNormalForm nf = resonant_normal_form(sys, info, degree, std::max(degree, 20));
  put(rec, "p", nf.p);
  put(rec, "q", nf.q);
  put(rec, "truncation_degree", nf.truncation_degree);
  put(rec, "delta", nf.delta);
  if (nf.delta != 0) {
    put(rec, "ell", nf.ell);
    if (nf.a_available) put(rec, "a", to_string(nf.a_coeff));
  }
  for (size_t k = 0; k < nf.c.size(); ++k)
    put(rec, "c_" + std::to_string(k + 1), to_string(nf.c[k]));
  bool obstruction = existence_obstruction(info, nf);
  put(rec, "existence_obstruction", obstruction ? "yes" : "no");
  rec.ok = true;
  if (has_num(t, "expect_obstruction"))
    rec.ok = obstruction == (num_or(t, "expect_obstruction", 0) != 0);
}

void run_verdict(const AnalysisJob& job, const TaskSpec& t, const JobOptions& opts,
                 TaskRecord& rec) {
  PlanarSystem sys = job.bound_system();
  SaddleInfo info = classify_saddle(sys, exact_point(job, sys, name_or(t, "point", "saddle")));
  std::string mode = name_or(t, "mode", "homoclinic");
  if (mode == "obstruction") {
    rec.rule = "nonexistence of an analytic inverse integrating factor";
    int degree = inum_or(t, "degree", opts.max_degree);
    ResonantNormalForm nf = resonant_normal_form(sys, info, degree, std::max(degree, 20));
    bool obstruction = existence_obstruction(info, nf);
    put(rec, "verdict", obstruction ? "NoAnalyticIIF" : "Undecided");
    put(rec, "delta", nf.delta);
    put(rec, "resonance", std::to_string(nf.p) + ":" + std::to_string(nf.q));
    rec.ok = !has_num(t, "expect_obstruction") ||
             obstruction == (num_or(t, "expect_obstruction", 0) != 0);
    return;
  }
  if (mode == "map-form") {
    rec.rule = "Dulac map leading-form asymptotics";
    int K = inum_or(t, "K", 3);
    SaddleQuantities sq;
    if (info.strong) {
      sq.alphas = {QuadExt(info.exact_jac->trace)};  // alpha_1 = div X(p0)
      sq.first_nonzero = 1;
    } else {
      sq = saddle_quantities(sys, info, K);
    }
    std::optional<int> m;
    if (has_num(t, "m")) m = inum_or(t, "m", 0);
    MapFormDescriptor d = roussarie_asymptotics(info.ratio_r, sq, std::nullopt, m);
    put(rec, "case", d.case_id);
    put(rec, "leading_form", d.leading_form);
    put(rec, "bound", d.bound ? std::to_string(*d.bound) : std::string("none"));
    if (!d.note.empty()) put(rec, "note", d.note);
    rec.ok = !has_num(t, "expect_case") || d.case_id == inum_or(t, "expect_case", 0);
    return;
  }
  if (mode != "homoclinic") throw std::invalid_argument("unknown verdict mode: " + mode);
  rec.rule = "homoclinic cyclicity from the vanishing multiplicity and saddle type";
  if (!has_num(t, "m")) throw std::invalid_argument("verdict needs the loop multiplicity m");
  int m = inum_or(t, "m", 1);
  std::optional<SaddleQuantities> sq;
  if (!info.strong) sq = saddle_quantities(sys, info, std::max(m, 1));
  CyclicityVerdict cv = homoclinic_cyclicity(m, info, sq);
  put(rec, "kind",
      cv.kind == VerdictKind::HomoclinicCyclicity ? "HomoclinicCyclicity" : "Undecided");
  put(rec, "m", cv.m);
  put(rec, "cyclicity", cv.cyclicity);
  put(rec, "branch", cv.branch);
  for (size_t i = 0; i < cv.evidence.size(); ++i)
    put(rec, "evidence_" + std::to_string(i + 1), cv.evidence[i]);
  rec.ok = !has_num(t, "expect_cyclicity") || cv.cyclicity == inum_or(t, "expect_cyclicity", -1);
}

void run_perturb(const AnalysisJob&, const TaskSpec& t, const JobOptions& opts, TaskRecord& rec) {
  rec.rule = "invariant-oval cofactors and characteristic exponents";
  int n = inum_or(t, "n", static_cast<int>(t.rat_list.size()));
  auto eps_it = t.rats.find("eps");
  if (eps_it == t.rats.end()) throw std::invalid_argument("perturb needs an exact eps");
  if (t.rat_list.empty()) throw std::invalid_argument("perturb needs the oval parameters a");
  OdeOptions oo = ode_options(t);
  PerturbationWitness pw = perturbation_witness(n, eps_it->second, t.rat_list, oo);
  put(rec, "n", n);
  put(rec, "eps", to_string(eps_it->second));
  for (size_t i = 0; i < pw.certificates.size(); ++i) {
    const OvalCertificate& c = pw.certificates[i];
    std::string tag = "oval_" + std::to_string(i + 1) + "_";
    put(rec, tag + "a", to_string(c.a));
    put(rec, tag + "invariant", c.invariant_ok ? "yes" : "no");
    put(rec, tag + "cofactor", poly_to_string(c.cofactor));
    put(rec, tag + "exponent", c.exponent);
    put(rec, tag + "hyperbolic", c.hyperbolic ? "yes" : "no");
  }
  put(rec, "all_certified", pw.all_certified ? "yes" : "no");
  rec.ok = pw.all_certified;
  if (!opts.out_dir.empty()) {
    std::ostringstream csv;
    csv << "oval,a,exponent,invariant,hyperbolic\n";
    for (size_t i = 0; i < pw.certificates.size(); ++i) {
      const OvalCertificate& c = pw.certificates[i];
      csv << (i + 1) << "," << to_string(c.a) << "," << format_double(c.exponent) << ","
          << (c.invariant_ok ? 1 : 0) << "," << (c.hyperbolic ? 1 : 0) << "\n";
    }
    write_artifact(opts, rec, "certificates", csv.str());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> AnalysisJob::free_params() const {
  std::set<std::string> names;
  collect_params(system.p, names);
  collect_params(system.q, names);
  if (iif) collect_params(*iif, names);
  for (const auto& [nm, c] : curves) collect_params(c, names);
  return {names.begin(), names.end()};
}

PlanarSystem AnalysisJob::bound_system() const {
  return PlanarSystem(bind_params(system.p, params), bind_params(system.q, params));
}

std::optional<IIF> AnalysisJob::bound_iif() const {
  if (!iif) return std::nullopt;
  return IIF(bind_params(*iif, params));
}

RPoly AnalysisJob::bound_curve(const std::string& name) const {
  auto it = curves.find(name);
  if (it == curves.end()) throw std::invalid_argument("unknown curve: " + name);
  return bind_params(it->second, params);
}

std::pair<Rational, Rational> AnalysisJob::point(const std::string& name) const {
  auto it = points.find(name);
  if (it == points.end()) throw std::invalid_argument("unknown point: " + name);
  return it->second;
}

AnalysisJob parse_job_text(const std::string& text, const std::string& origin) {
  njson root;
  try {
    root = njson::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument(origin + ": job must be a JSON object");
  for (const auto& [key, v] : root.items()) {
    if (key != "name" && key != "system" && key != "params" && key != "iif" && key != "curves" &&
        key != "points" && key != "tasks")
      field_error(origin + "." + key, "unknown section");
  }
  AnalysisJob job;
  job.name = root.value("name", "");
  if (!root.contains("system") || !root["system"].is_object() || !root["system"].contains("p") ||
      !root["system"].contains("q"))
    throw std::invalid_argument(origin + ".system: need polynomials p and q");
  PPoly p = json_poly(root["system"]["p"], origin + ".system.p");
  PPoly q = json_poly(root["system"]["q"], origin + ".system.q");
  job.system = ParamSystem(std::move(p), std::move(q));
  if (root.contains("params")) {
    if (!root["params"].is_object()) field_error(origin + ".params", "expected an object");
    for (const auto& [nm, v] : root["params"].items())
      job.params[nm] = json_rat(v, origin + ".params." + nm);
  }
  if (root.contains("iif")) job.iif = json_poly(root["iif"], origin + ".iif");
  if (root.contains("curves")) {
    if (!root["curves"].is_object()) field_error(origin + ".curves", "expected an object");
    for (const auto& [nm, v] : root["curves"].items())
      job.curves[nm] = json_poly(v, origin + ".curves." + nm);
  }
  if (root.contains("points")) {
    if (!root["points"].is_object()) field_error(origin + ".points", "expected an object");
    for (const auto& [nm, v] : root["points"].items()) {
      std::string path = origin + ".points." + nm;
      if (!v.is_array() || v.size() != 2) field_error(path, "expected [x, y]");
      job.points[nm] = {json_rat(v[0], path + "[0]"), json_rat(v[1], path + "[1]")};
    }
  }
  if (root.contains("tasks")) {
    if (!root["tasks"].is_array()) field_error(origin + ".tasks", "expected an array");
    int idx = 0;
    for (const auto& tj : root["tasks"]) {
      std::string path = origin + ".tasks[" + std::to_string(idx++) + "]";
      if (!tj.is_object() || !tj.contains("task") || !tj["task"].is_string())
        field_error(path, "expected an object with a \"task\" kind");
      TaskSpec t;
      t.kind = tj["task"].get<std::string>();
      for (const auto& [key, v] : tj.items()) {
        if (key == "task") continue;
        std::string kpath = path + "." + key;
        if (key == "a") {
          if (!v.is_array()) field_error(kpath, "expected an array of exact rationals");
          int ai = 0;
          for (const auto& av : v)
            t.rat_list.push_back(json_rat(av, kpath + "[" + std::to_string(ai++) + "]"));
        } else if (key == "eps") {
          t.rats[key] = json_rat(v, kpath);
        } else if (v.is_string()) {
          t.names[key] = v.get<std::string>();
        } else if (v.is_number()) {
          t.nums[key] = v.get<double>();
        } else if (v.is_boolean()) {
          t.nums[key] = v.get<bool>() ? 1 : 0;
        } else {
          field_error(kpath, "unsupported setting type");
        }
      }
      validate_task(t, job, path);
      job.tasks.push_back(std::move(t));
    }
  }
  return job;
}

AnalysisJob parse_job_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open job file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_job_text(buf.str(), path);
}

JobReport run_job(const AnalysisJob& job, const JobOptions& opts) {
  JobReport rep;
  rep.job = job.name.empty() ? "job" : job.name;
  int idx = 0;
  for (const TaskSpec& t : job.tasks) {
    TaskRecord rec;
    rec.index = ++idx;
    rec.task = t.kind;
    try {
      if (t.kind == "verify-iif")
        run_verify_iif(job, t, opts, rec);
      else if (t.kind == "poincare")
        run_poincare(job, t, opts, rec);
      else if (t.kind == "identity-check")
        run_identity_check(job, t, opts, rec);
      else if (t.kind == "multiplicity")
        run_multiplicity(job, t, opts, rec);
      else if (t.kind == "trace-homoclinic")
        run_trace_homoclinic(job, t, opts, rec);
      else if (t.kind == "saddle")
        run_saddle(job, t, opts, rec);
      else if (t.kind == "normal-form")
        run_normal_form(job, t, opts, rec);
      else if (t.kind == "verdict")
        run_verdict(job, t, opts, rec);
      else if (t.kind == "perturb")
        run_perturb(job, t, opts, rec);
      else
        throw std::invalid_argument("unknown task kind: " + t.kind);
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

bool JobReport::all_ok() const {
  for (const TaskRecord& r : records)
    if (!r.ok) return false;
  return true;
}

std::string JobReport::to_text() const {
  std::ostringstream os;
  os << "job: " << job << "\n";
  int pass = 0;
  for (const TaskRecord& r : records) {
    os << "task " << r.index << ": " << r.task << " -- " << (r.ok ? "pass" : "FAIL") << "\n";
    if (!r.rule.empty()) os << "  rule: " << r.rule << "\n";
    for (const auto& [k, v] : r.fields) os << "  " << k << ": " << v << "\n";
    if (!r.error.empty()) os << "  error: " << r.error << "\n";
    if (r.ok) ++pass;
  }
  os << "summary: " << pass << "/" << records.size() << " tasks pass\n";
  return os.str();
}

std::string JobReport::to_json() const {
  njson j;
  j["job"] = job;
  j["tasks"] = njson::array();
  for (const TaskRecord& r : records) {
    njson tj;
    tj["index"] = r.index;
    tj["task"] = r.task;
    tj["rule"] = r.rule;
    tj["ok"] = r.ok;
    njson fields = njson::object();
    for (const auto& [k, v] : r.fields) {
      std::string key = k;
      int suffix = 2;
      while (fields.contains(key)) key = k + "_" + std::to_string(suffix++);
      fields[key] = v;
    }
    tj["fields"] = fields;
    if (!r.error.empty()) tj["error"] = r.error;
    j["tasks"].push_back(tj);
  }
  j["all_ok"] = all_ok();
  return j.dump(2) + "\n";
}

std::vector<std::string> builtin_job_names() { return {"example1", "example2-m1", "andronov"}; }

namespace {

// Shared verbatim with the sample files under jobs/.
const char* builtin_job_text(const std::string& name) {
  if (name == "example1") {
    return R"JOB({
  "name": "example1",
  "system": {
    "p": "l*x - y + l*m1*x^3 + (m2 - m1 + m1*m2)*x^2*y + l*m1*m2*x*y^2 + m2*y^3",
    "q": "x + l*y - x^3 + l*m1*x^2*y + (m1*m2 - m1 - 1)*x*y^2 + l*m1*m2*y^3"
  },
  "params": {"l": "1/2", "m1": "-2", "m2": "1"},
  "iif": "(x^2 + y^2)*(1 + m1*x^2 + m1*m2*y^2)",
  "curves": {
    "ellipse": "1 + m1*x^2 + m1*m2*y^2",
    "focus_factor": "x^2 + y^2"
  },
  "points": {"focus": ["0", "0"]},
  "tasks": [
    {"task": "verify-iif", "samples": 6},
    {"task": "multiplicity", "orbit": "focus-ellipse", "curve": "ellipse",
     "expect_m": 1, "count": 12},
    {"task": "identity-check", "orbit": "focus-ellipse", "count": 20,
     "sigma_max": 0.2, "tol": 1e-6},
    {"task": "poincare", "x": 0.7071067811865476, "y": 0, "dx": -1, "dy": 0,
     "count": 10, "sigma_max": 0.15,
     "implicit_k0": 535.4916555247647, "implicit_tol": 1e-5}
  ]
})JOB";
  }
  if (name == "example2-m1") {
    return R"JOB({
  "name": "example2-m1",
  "system": {
    "p": "-2*y*(x^2 + y^2) - 2*(y^2 - 1 + x + x^2 - x^3)*(x + y)",
    "q": "(1 + 2*x - 3*x^2)*(x^2 + y^2) + 2*(y^2 - 1 + x + x^2 - x^3)*(x - y)"
  },
  "iif": "(x^2 + y^2)*(y^2 - 1 + x + x^2 - x^3)",
  "curves": {
    "loop": "y^2 - 1 + x + x^2 - x^3",
    "focus_factor": "x^2 + y^2"
  },
  "points": {"saddle": ["1", "0"], "focus": ["0", "0"]},
  "tasks": [
    {"task": "verify-iif"},
    {"task": "trace-homoclinic", "saddle": "saddle", "offset": 1e-6,
     "capture_radius": 0.05},
    {"task": "multiplicity", "saddle": "saddle", "curve": "loop",
     "expect_m": 1, "count": 12},
    {"task": "saddle", "point": "saddle", "K": 3, "expect_all_zero": 1},
    {"task": "verdict", "point": "saddle", "m": 1, "expect_cyclicity": 2}
  ]
})JOB";
  }
  if (name == "andronov") {
    return R"JOB({
  "name": "andronov",
  "system": {
    "p": "-x + 2*y + x^2",
    "q": "2*x - y - 3*x^2 + (3/2)*x*y"
  },
  "curves": {"loop": "x^2 - x^3 - y^2"},
  "points": {"saddle": ["0", "0"]},
  "tasks": [
    {"task": "saddle", "point": "saddle", "expect_strong": true,
     "expect_resonance": "1:3"},
    {"task": "normal-form", "point": "saddle", "degree": 9,
     "expect_obstruction": true},
    {"task": "verdict", "point": "saddle", "mode": "obstruction", "degree": 9,
     "expect_obstruction": true}
  ]
})JOB";
  }
  throw std::invalid_argument("unknown builtin job: " + name);
}

}  // namespace

AnalysisJob builtin_job(const std::string& name) {
  return parse_job_text(builtin_job_text(name), "builtin:" + name);
}

}  // namespace iif
