#include "iif/iif.hpp"

#include "iif/flow.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace iif {

bool verify_iif_sampled(const ParamSystem& sys, const PPoly& v,
                        const std::vector<std::string>& params, unsigned seed, int count) {
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  PPoly residual = verify_iif(sys, v);
  if (residual.is_zero_poly()) return true;
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> num(-12, 12);
  std::uniform_int_distribution<int> den(1, 7);
  for (int k = 0; k < count; ++k) {
    std::map<std::string, Rational> binding;
    for (const auto& name : params) binding[name] = Rational(num(gen), den(gen));
    RPoly bound = bind_params(residual, binding);
    if (!bound.is_zero_poly()) return false;
  }
  return true;
}

double iif_ratio_first_integral(const IIF& v1, const IIF& v2, const PlanarSystem& sys,
                                const std::vector<std::pair<double, double>>& probes,
                                double t_span, double rel_tol) {
  if (probes.empty()) throw std::invalid_argument("need at least one probe point");
  double worst = 0;
  for (auto [x0, y0] : probes) {
    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = rel_tol * 1e-2;
    opts.max_time = std::abs(t_span);
    Trajectory tr = integrate(sys, x0, y0, t_span, opts);
    // scale for the vanishing test of the denominator
    double scale2 = 0;
    for (size_t i = 0; i < tr.size(); ++i)
      scale2 = std::max(scale2, std::abs(v2.v.eval_d(tr.xs[i], tr.ys[i])));
    double ratio0 = 0;
    bool have0 = false;
    for (size_t i = 0; i < tr.size(); ++i) {
      double a = v1.v.eval_d(tr.xs[i], tr.ys[i]);
      double b = v2.v.eval_d(tr.xs[i], tr.ys[i]);
      if (std::abs(b) < 1e-12 * std::max(scale2, 1.0))
        throw std::runtime_error("V2 vanished on orbit");
      double r = a / b;
      if (!have0) {
        ratio0 = r;
        have0 = true;
      } else {
        worst = std::max(worst, std::abs(r - ratio0) / std::max(std::abs(ratio0), 1e-15));
      }
    }
  }
  return worst;
}

}  // namespace iif
