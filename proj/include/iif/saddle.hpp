#pragma once

#include "iif/iif.hpp"
#include "iif/normal_form.hpp"
#include "iif/system.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iif {

// Classification of a hyperbolic saddle p0: eigenvalues lambda > 0 > mu,
// hyperbolicity ratio r = -mu/lambda, strong iff div X(p0) = lambda + mu != 0,
// p:q resonance iff r = q/p exactly (exact mode) or within tolerance
// (numeric mode, flagged and never used for exact normal forms).
struct SaddleInfo {
  double x = 0, y = 0;
  bool exact = false;  // rational location with rational Jacobian
  Rational rx, ry;
  std::optional<JacobianInfo> exact_jac;

  double lambda = 0, mu = 0;
  double ratio_r = 0;
  bool strong = false;
  bool rational_eigenvalues = false;
  Rational lambda_exact, mu_exact;  // populated iff rational_eigenvalues

  std::optional<std::pair<int, int>> resonance;  // (p, q) coprime with r = q/p
  bool numeric_resonance = false;

  std::array<double, 2> evec_lambda = {0, 0};  // unit eigenvectors
  std::array<double, 2> evec_mu = {0, 0};
};

SaddleInfo classify_saddle(const PlanarSystem& sys, const SingularPoint& pt);

// Saddle quantities of a weak saddle, alphas[k-1] = alpha_k for k = 1..K+1:
// alpha_1 = div X(p0) (zero for weak saddles) and alpha_{k+1} = a_k - b_k
// read off the Poincare-Dulac normal form
//   dx = x (1 + sum a_i (xy)^i),  dy = -y (1 + sum b_i (xy)^i).
// Entries live in Q or in a real quadratic extension (weak saddles of
// rational systems have eigenvalues +-sqrt(-det)).
struct SaddleQuantities {
  std::vector<QuadExt> alphas;
  std::optional<int> first_nonzero;  // 1-based index into alphas
  std::string report;

  // Exact rational value of alpha_k (1-based); throws if irrational.
  Rational alpha(int k) const;
};

SaddleQuantities saddle_quantities(const PlanarSystem& sys, const SaddleInfo& saddle, int K,
                                   int max_k = 8);

// Formal orbital normal form at a p:q resonant saddle, rescaled so the
// eigenvalues are (p, -q) and U = X^q Y^p:
//   dX = pX (1 + sum A_k U^k),  dY = -qY (1 + sum B_k U^k),
// orbitally reduced through C(U) = (1+A)/(1+B) - 1 to
//   dX = pX [1 + delta (U^ell + a U^{2ell})],  dY = -qY.
// delta = 0 means formally orbitally linearizable up to truncation_degree.
struct ResonantNormalForm {
  int p = 1, q = 1;
  int delta = 0;
  int ell = 0;
  QuadExt a_coeff;  // meaningful only when delta != 0 and a_available
  bool a_available = false;
  int truncation_degree = 0;
  int k_max = 0;                 // number of resolvable U-powers
  std::vector<QuadExt> A, B, c;  // retained resonant and orbital coefficients, k = 1..k_max
  std::string report;
};

ResonantNormalForm resonant_normal_form(const PlanarSystem& sys, const SaddleInfo& saddle,
                                        int degree, int max_degree = 20);

// Local factorization V = f_lambda^{m1} f_mu^{m2} u at the saddle, with the
// balance m1*lambda + m2*mu = div X(p0) and the case pattern
//   nonresonant: (1,1); resonant strong: (1+kq, 1+kp); weak: (m, m).
// Passing the same polynomial for both factors declares that both separatrix
// branches lie inside one curve (gradient zero, cone through both
// eigendirections); then m1 = m2 = multiplicity of V by that curve.
struct LocalFactorization {
  int m1 = 0, m2 = 0;
  bool unit_nonzero = false;
  bool balance_ok = false;
  bool case_ok = false;
  std::string case_label;
};

LocalFactorization local_iif_factorization(const PlanarSystem& sys, const IIF& v,
                                           const SaddleInfo& saddle, const RPoly& f_lambda,
                                           const RPoly& f_mu);

// Truncated invariant-branch polynomial at a rational-eigenvalue saddle:
// in eigencoordinates the branch tangent to the chosen eigenvector is the
// graph eta = h(xi) + O(xi^{degree+1}); returns eta - h(xi) pulled back to
// (x,y), an exact polynomial vanishing on the branch to the stated order.
enum class SeparatrixBranch { Unstable, Stable };  // lambda resp. mu direction

RPoly separatrix_series(const PlanarSystem& sys, const SaddleInfo& saddle, SeparatrixBranch branch,
                        int degree);

// Order of vanishing of V across the given separatrix branch: substitutes the
// straightening eta -> w + h(xi) and reports the least power of w with a
// nonzero coefficient series. `order_valid_to` bounds the xi-orders the
// truncation certifies.
struct TransverseMultiplicity {
  int m = 0;
  int order_valid_to = 0;
};

TransverseMultiplicity transverse_multiplicity(const PlanarSystem& sys, const SaddleInfo& saddle,
                                               const RPoly& v, SeparatrixBranch branch,
                                               int degree);

// Theorem-consistency of computed saddle quantities with a claimed vanishing
// multiplicity m: requires alpha_i = 0 for i < m; returns alpha_m != 0.
bool formal_iif_consistency(const SaddleQuantities& sq, int m);

}  // namespace iif
