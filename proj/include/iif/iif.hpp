#pragma once

#include "iif/parampoly.hpp"
#include "iif/system.hpp"

#include <random>
#include <vector>

namespace iif {

template <class R>
struct FactorPower {
  BiPoly<R> factor;
  int exponent = 1;
};

// Analytic (here: polynomial) inverse integrating factor candidate, possibly
// with a declared factorization V = unit * prod factor_k^{e_k}.
template <class R>
struct InverseIntegratingFactor {
  BiPoly<R> v;
  std::vector<FactorPower<R>> declared;  // empty when no factorization is declared
  BiPoly<R> unit = BiPoly<R>::constant(R(1));

  InverseIntegratingFactor() = default;
  explicit InverseIntegratingFactor(BiPoly<R> v_) : v(std::move(v_)) {
    if (v.is_zero_poly()) throw std::invalid_argument("inverse integrating factor must be nonzero");
  }
  InverseIntegratingFactor(BiPoly<R> v_, std::vector<FactorPower<R>> fs, BiPoly<R> u)
      : v(std::move(v_)), declared(std::move(fs)), unit(std::move(u)) {
    if (v.is_zero_poly()) throw std::invalid_argument("inverse integrating factor must be nonzero");
    BiPoly<R> prod = unit;
    for (const auto& fp : declared) prod *= fp.factor.pow(fp.exponent);
    if (!(prod == v))
      throw std::invalid_argument("declared factorization does not expand to the factor");
  }
};

using IIF = InverseIntegratingFactor<Rational>;
using ParamIIF = InverseIntegratingFactor<ParamPoly>;

// Residual of the defining linear PDE: X V - V div X, expanded exactly.
// The zero polynomial certifies V.
template <class R>
BiPoly<R> verify_iif(const System2<R>& sys, const BiPoly<R>& v) {
  return lie_derivative(sys, v) - v * divergence(sys);
}

// Sampling mode for parametric systems: substitutes `count` pseudo-random
// rational parameter tuples and checks the residual vanishes for each.
// Must agree with the symbolic mode; used as an independent cross-check.
bool verify_iif_sampled(const ParamSystem& sys, const PPoly& v,
                        const std::vector<std::string>& params, unsigned seed, int count);

// Largest m with f^m | V exactly.
template <class R>
int symbolic_multiplicity(const BiPoly<R>& v, const BiPoly<R>& f) {
  if (v.is_zero_poly()) throw std::invalid_argument("zero polynomial has no multiplicity");
  return multiplicity_of_factor(v, f);
}

// Maximum relative variation of V1/V2 along numerically integrated probe
// orbits; near-zero variation evidences that the ratio is a first integral.
// Throws "V2 vanished on orbit" when |V2| falls below tolerance on a path.
double iif_ratio_first_integral(const IIF& v1, const IIF& v2, const PlanarSystem& sys,
                                const std::vector<std::pair<double, double>>& probes,
                                double t_span, double rel_tol = 1e-10);

}  // namespace iif
