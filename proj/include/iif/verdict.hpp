#pragma once

#include "iif/flow.hpp"
#include "iif/saddle.hpp"
#include "iif/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iif {

enum class VerdictKind {
  LimitCycleMultiplicity,
  PeriodAnnulus,
  HomoclinicCyclicity,
  NoAnalyticIIF,
  Undecided,
};

// Cyclicity conclusion with its evidence trail. HomoclinicCyclicity values
// are 1 (strong saddle), 2m-1 (weak, alpha_m != 0) or 2m (weak, alpha_m = 0).
struct CyclicityVerdict {
  VerdictKind kind = VerdictKind::Undecided;
  int m = 0;          // multiplicity, when applicable
  int cyclicity = 0;  // homoclinic cyclicity, when applicable
  std::string branch;
  std::string reason;                 // for Undecided
  std::string rule;                   // decision rule applied
  std::vector<std::string> evidence;  // contributing facts, never empty
  std::string to_text() const;
};

// Limit-cycle verdict from the vanishing order of V on the cycle.
// Integer m >= 1 means multiplicity-m limit cycle or period annulus; the
// dichotomy is resolved by the optional return-map probe (max |Pi(s)-s| over
// a grid). rho = 0 or a non-natural rho > 1 forces a period annulus.
CyclicityVerdict limit_cycle_verdict(double m_or_rho, bool leading_ok,
                                     std::optional<double> return_map_deviation = std::nullopt,
                                     double tol = 1e-9);

// Homoclinic-loop cyclicity from the loop multiplicity m of V and the saddle
// classification: strong -> 1 (m must be 1), weak with alpha_m != 0 -> 2m-1,
// weak with alpha_m = 0 -> 2m.
CyclicityVerdict homoclinic_cyclicity(int m, const SaddleInfo& saddle,
                                      const std::optional<SaddleQuantities>& alphas);

// Leading form of the Dulac return map Pi(sigma) near a homoclinic loop and
// the limit-cycle bound of the matching asymptotic case:
//   (1) r != 1:                  Pi = c sigma^r (1+o(1)),        bound 1
//   (2) alpha_1 = 0, beta_1 != 0: Pi = e^{beta_1} sigma + o(sigma), bound 2
//   (3) first nonzero alpha_{k+1}: Pi = sigma + alpha_{k+1} sigma^{k+1} log sigma + ..., bound 2k+1
//   (4) alpha_k = 0, beta_k != 0:  Pi = sigma + beta_k sigma^k + o(sigma^k), bound 2k
//   (5) all vanish:               Pi = sigma, no upper bound (distinguished
//       descriptor, not an error).
// beta_k for k >= 2 is never computed; when the loop multiplicity m is
// supplied and alpha_m = 0, beta_m is recorded as nonzero symbolically.
struct MapFormDescriptor {
  int case_id = 0;  // 1..5
  std::string leading_form;
  std::optional<int> bound;  // empty in case 5
  std::string note;
  std::string to_text() const;
};

MapFormDescriptor roussarie_asymptotics(double r, const SaddleQuantities& alphas,
                                        std::optional<double> beta1 = std::nullopt,
                                        std::optional<int> m = std::nullopt, double tol = 1e-9);

// True iff no analytic inverse integrating factor can exist in a neighborhood
// of a homoclinic loop through this saddle: p:q resonant, strong (p != q),
// with a nonzero orbital obstruction delta.
bool existence_obstruction(const SaddleInfo& saddle, const ResonantNormalForm& nf);

// Perturbation family realizing n limit cycles bifurcating from the fish-loop
// Hamiltonian: dx = -2y, dy = -2x + 3x^2 + eps y prod_i (f + a_i eps) with
// f = y^2 - x^2 + x^3. Requires 0 < a_i eps < 4/27 pairwise distinct (each
// oval f + a_i eps = 0 must be a closed curve in the fish region).
struct OvalCertificate {
  Rational a;             // oval parameter a_i
  RPoly oval;             // f + a_i eps
  RPoly cofactor;         // X(oval) / oval
  bool invariant_ok = false;
  double witness_x = 0, witness_y = 0;  // point on the oval
  double exponent = 0;    // characteristic exponent of the oval cycle
  bool hyperbolic = false;
};

struct PerturbationWitness {
  PlanarSystem sys;
  std::vector<OvalCertificate> certificates;
  bool all_certified = false;  // every oval invariant with nonzero exponent
};

PerturbationWitness perturbation_witness(int n, const Rational& eps,
                                         const std::vector<Rational>& a,
                                         const OdeOptions& opts = {});

}  // namespace iif
