#include "iif/corpus.hpp"
#include "iif/job.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
  std::string job_path;
  std::string out_dir;
  std::string format = "text";
  double tol = 1e-6;
  int max_degree = 15;
  unsigned seed = 1;
};

iif::JobOptions job_options(const CommonFlags& cf, const std::string& out_subdir = "") {
  iif::JobOptions opts;
  opts.tol = cf.tol;
  opts.max_degree = cf.max_degree;
  opts.seed = cf.seed;
  if (!cf.out_dir.empty())
    opts.out_dir = out_subdir.empty() ? cf.out_dir : cf.out_dir + "/" + out_subdir;
  return opts;
}

int emit_report(const iif::JobReport& rep, const CommonFlags& cf, const iif::JobOptions& opts) {
  if (cf.format == "json")
    std::cout << rep.to_json();
  else
    std::cout << rep.to_text();
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream out(std::filesystem::path(opts.out_dir) / (rep.job + "-report.json"),
                      std::ios::binary);
    out << rep.to_json();
  }
  return rep.all_ok() ? 0 : 1;
}

// Settings a subcommand collected from its own flags; only flags the user
// actually passed make it into the synthesized task.
struct FlagTask {
  iif::TaskSpec spec;
  bool any = false;

  void name(CLI::App* sub, const std::string& flag, const std::string& key, std::string& slot) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt && opt->count()) {
      spec.names[key] = slot;
      any = true;
    }
  }
  void num(CLI::App* sub, const std::string& flag, const std::string& key, double& slot) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt && opt->count()) {
      spec.nums[key] = slot;
      any = true;
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "iifcycles: planar polynomial vector fields, inverse integrating factors,\n"
      "return maps, saddle quantities and cyclicity verdicts"};
  app.require_subcommand(0, 1);

  CommonFlags cf;
  app.add_option("--job", cf.job_path, "JSON job file (sections: system, params, iif, curves, points, tasks)");
  app.add_option("--out", cf.out_dir, "output directory for the JSON report and CSV plot data");
  app.add_option("--tol", cf.tol, "default analysis tolerance")->capture_default_str();
  app.add_option("--max-degree", cf.max_degree, "normal-form truncation cap")->capture_default_str();
  app.add_option("--seed", cf.seed, "seed for random rational sampling")->capture_default_str();
  app.add_option("--format", cf.format, "report format on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // Per-subcommand flag targets.
  double g_samples = 8, g_x = 0, g_y = 0, g_dx = 1, g_dy = 0, g_count = 10, g_sigma_min = 0,
         g_sigma_max = 0.2, g_half = 1, g_K = 3, g_degree = 0, g_m = 1, g_offset = 1e-6,
         g_capture = 0.05, g_n = 0, g_expect_m = 0, g_expect_cyc = 0, g_n_lo = 1e-4, g_n_hi = 1e-2;
  std::string g_point = "saddle", g_curve, g_orbit, g_start, g_saddle, g_mode = "homoclinic",
              g_eps = "1/100";
  std::vector<std::string> g_a;

  std::map<std::string, CLI::App*> subs;
  std::map<std::string, FlagTask> tasks;
  auto add_sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    subs[name] = sub;
    tasks[name].spec.kind = name;
    return sub;
  };

  CLI::App* s_verify = add_sub("verify-iif", "check X V = V div X exactly (and by sampling)");
  s_verify->add_option("--samples", g_samples, "random rational parameter tuples");

  CLI::App* s_poincare = add_sub("poincare", "return map samples on a transversal section");
  s_poincare->add_option("--point", g_point, "section base point name");
  s_poincare->add_option("--x", g_x, "section base x");
  s_poincare->add_option("--y", g_y, "section base y");
  s_poincare->add_option("--dx", g_dx, "section direction x");
  s_poincare->add_option("--dy", g_dy, "section direction y");
  s_poincare->add_option("--count", g_count, "number of sigma samples");
  s_poincare->add_option("--sigma-min", g_sigma_min, "smallest sigma");
  s_poincare->add_option("--sigma-max", g_sigma_max, "largest sigma");
  s_poincare->add_option("--half", g_half, "section half (+1, -1, 0)");

  CLI::App* s_identity = add_sub("identity-check", "transition identity for the transported factor");
  s_identity->add_option("--orbit", g_orbit, "named closed-form orbit (focus-ellipse)");
  s_identity->add_option("--start", g_start, "cycle start point name");
  s_identity->add_option("--x", g_x, "cycle start x");
  s_identity->add_option("--y", g_y, "cycle start y");
  s_identity->add_option("--count", g_count, "sigma grid size");
  s_identity->add_option("--sigma-max", g_sigma_max, "largest chart offset");

  CLI::App* s_mult = add_sub("multiplicity", "vanishing multiplicity of V along an orbit");
  s_mult->add_option("--orbit", g_orbit, "named closed-form orbit (focus-ellipse)");
  s_mult->add_option("--start", g_start, "cycle start point name");
  s_mult->add_option("--x", g_x, "cycle start x");
  s_mult->add_option("--y", g_y, "cycle start y");
  s_mult->add_option("--saddle", g_saddle, "saddle point name (homoclinic loop mode)");
  s_mult->add_option("--curve", g_curve, "named curve for the symbolic multiplicity");
  s_mult->add_option("--count", g_count, "number of s samples");
  s_mult->add_option("--expect-m", g_expect_m, "expected multiplicity");
  s_mult->add_option("--n-lo", g_n_lo, "smallest offset in the fit window");
  s_mult->add_option("--n-hi", g_n_hi, "largest offset in the fit window");

  CLI::App* s_saddle = add_sub("saddle", "classify a saddle and compute its quantities");
  s_saddle->add_option("--point", g_point, "saddle point name");
  s_saddle->add_option("--K", g_K, "number of quantities beyond alpha_1");

  CLI::App* s_nf = add_sub("normal-form", "resonant orbital normal form at a saddle");
  s_nf->add_option("--point", g_point, "saddle point name");
  s_nf->add_option("--degree", g_degree, "truncation degree");

  CLI::App* s_verdict = add_sub("verdict", "cyclicity verdict for a homoclinic loop");
  s_verdict->add_option("--point", g_point, "saddle point name");
  s_verdict->add_option("--mode", g_mode, "homoclinic | obstruction | map-form");
  s_verdict->add_option("--m", g_m, "vanishing multiplicity of V on the loop");
  s_verdict->add_option("--degree", g_degree, "normal-form degree (obstruction mode)");
  s_verdict->add_option("--expect-cyclicity", g_expect_cyc, "expected cyclicity");

  CLI::App* s_trace = add_sub("trace-homoclinic", "follow a separatrix to a saddle connection");
  s_trace->add_option("--saddle", g_saddle, "saddle point name");
  s_trace->add_option("--offset", g_offset, "initial offset along the unstable direction");
  s_trace->add_option("--capture-radius", g_capture, "saddle capture radius");

  CLI::App* s_perturb = add_sub("perturb", "perturbation witness with invariant ovals");
  s_perturb->add_option("--n", g_n, "number of ovals");
  s_perturb->add_option("--eps", g_eps, "exact perturbation size (rational)");
  s_perturb->add_option("--a", g_a, "exact oval parameters (rationals)");

  CLI::App* s_corpus = add_sub("corpus", "run all built-in example jobs");
  (void)s_corpus;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* chosen = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    std::string kind = chosen ? chosen->get_name() : "";

    if (kind == "corpus") {
      int worst = 0;
      for (const std::string& name : iif::builtin_job_names()) {
        iif::AnalysisJob job = iif::builtin_job(name);
        iif::JobOptions opts = job_options(cf, name);
        int rc = emit_report(iif::run_job(job, opts), cf, opts);
        worst = std::max(worst, rc);
      }
      return worst;
    }

    if (!chosen && cf.job_path.empty()) {
      std::cerr << app.help();
      return 2;
    }

    iif::AnalysisJob job;
    if (!cf.job_path.empty()) {
      job = iif::parse_job_file(cf.job_path);
    } else if (kind == "perturb") {
      job.name = "perturb";  // the witness family carries its own system
      job.system = iif::corpus_entry("fish").system;
    } else {
      std::cerr << "input error: " << kind << " needs --job <file>\n";
      return 2;
    }

    if (chosen) {
      FlagTask& ft = tasks[kind];
      ft.num(chosen, "--samples", "samples", g_samples);
      ft.name(chosen, "--point", "point", g_point);
      ft.num(chosen, "--x", "x", g_x);
      ft.num(chosen, "--y", "y", g_y);
      ft.num(chosen, "--dx", "dx", g_dx);
      ft.num(chosen, "--dy", "dy", g_dy);
      ft.num(chosen, "--count", "count", g_count);
      ft.num(chosen, "--sigma-min", "sigma_min", g_sigma_min);
      ft.num(chosen, "--sigma-max", "sigma_max", g_sigma_max);
      ft.num(chosen, "--half", "half", g_half);
      ft.name(chosen, "--orbit", "orbit", g_orbit);
      ft.name(chosen, "--start", "start", g_start);
      ft.name(chosen, "--saddle", "saddle", g_saddle);
      ft.name(chosen, "--curve", "curve", g_curve);
      ft.num(chosen, "--expect-m", "expect_m", g_expect_m);
      ft.num(chosen, "--n-lo", "n_lo", g_n_lo);
      ft.num(chosen, "--n-hi", "n_hi", g_n_hi);
      ft.num(chosen, "--K", "K", g_K);
      ft.num(chosen, "--degree", "degree", g_degree);
      ft.name(chosen, "--mode", "mode", g_mode);
      ft.num(chosen, "--m", "m", g_m);
      ft.num(chosen, "--expect-cyclicity", "expect_cyclicity", g_expect_cyc);
      ft.num(chosen, "--offset", "offset", g_offset);
      ft.num(chosen, "--capture-radius", "capture_radius", g_capture);
      ft.num(chosen, "--n", "n", g_n);
      if (kind == "perturb") {
        ft.spec.rats["eps"] = iif::parse_rational(g_eps);
        for (const std::string& av : g_a) ft.spec.rat_list.push_back(iif::parse_rational(av));
        ft.any = true;
      }

      std::vector<iif::TaskSpec> file_tasks;
      for (const iif::TaskSpec& t : job.tasks)
        if (t.kind == kind) file_tasks.push_back(t);
      if (ft.any || file_tasks.empty())
        job.tasks = {ft.spec};
      else
        job.tasks = file_tasks;
    }

    iif::JobOptions opts = job_options(cf);
    return emit_report(iif::run_job(job, opts), cf, opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
