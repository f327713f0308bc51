#pragma once

#include "iif/iif.hpp"
#include "iif/parampoly.hpp"
#include "iif/system.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iif {

// One task inside an analysis job. `kind` is one of: verify-iif, poincare,
// identity-check, multiplicity, trace-homoclinic, saddle, normal-form,
// verdict, perturb. Settings not used by a kind are ignored; string settings
// reference entries of the job's named curves/points tables.
struct TaskSpec {
  std::string kind;
  std::map<std::string, std::string> names;
  std::map<std::string, double> nums;
  std::map<std::string, Rational> rats;
  std::vector<Rational> rat_list;  // e.g. the oval parameters of `perturb`
};

// Parsed job: a system (possibly with symbolic parameters bound in `params`),
// an optional inverse-integrating-factor candidate, named curves and points,
// and an ordered task list.
struct AnalysisJob {
  std::string name;
  ParamSystem system;
  std::map<std::string, Rational> params;
  std::optional<PPoly> iif;
  std::map<std::string, PPoly> curves;
  std::map<std::string, std::pair<Rational, Rational>> points;
  std::vector<TaskSpec> tasks;

  // Parameter names appearing anywhere in the job's polynomials.
  std::vector<std::string> free_params() const;
  // Numeric instance with `params` substituted; throws when symbols remain.
  PlanarSystem bound_system() const;
  std::optional<IIF> bound_iif() const;
  RPoly bound_curve(const std::string& name) const;
  std::pair<Rational, Rational> point(const std::string& name) const;
};

struct JobOptions {
  double tol = 1e-6;     // default analysis tolerance (tasks may override)
  int max_degree = 15;   // truncation cap for normal forms
  unsigned seed = 1;     // pseudo-random rational sampling
  std::string out_dir;   // when nonempty, CSV plot data is written here
};

// Outcome of a single task: pass/fail, the decision rule applied, ordered
// (key, value) result fields, and the error text when the task aborted.
// A failed task never stops the job; later tasks still run.
struct TaskRecord {
  int index = 0;  // 1-based position in the job
  std::string task;
  std::string rule;
  bool ok = false;
  std::vector<std::pair<std::string, std::string>> fields;
  std::string error;
};

struct JobReport {
  std::string job;
  std::vector<TaskRecord> records;

  bool all_ok() const;
  std::string to_text() const;  // human-readable, deterministic
  std::string to_json() const;  // machine-readable, deterministic
};

// Deterministic float formatting used by all reports ("%.12g").
std::string format_double(double v);

// JSON job files: sections "system" (polynomials as [i, j, coeff] triples or
// expression strings), "params", "iif", "curves", "points", "tasks".
// Coefficients are exact rationals or expressions in bound parameter symbols.
// Parse errors carry the offending field path.
AnalysisJob parse_job_text(const std::string& text, const std::string& origin = "<job>");
AnalysisJob parse_job_file(const std::string& path);

JobReport run_job(const AnalysisJob& job, const JobOptions& opts = {});

// Built-in corpus jobs (example1, example2-m1, andronov).
std::vector<std::string> builtin_job_names();
AnalysisJob builtin_job(const std::string& name);

}  // namespace iif
