#include "iif/verdict.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iif {

namespace {

const char* kind_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::LimitCycleMultiplicity: return "LimitCycleMultiplicity";
    case VerdictKind::PeriodAnnulus: return "PeriodAnnulus";
    case VerdictKind::HomoclinicCyclicity: return "HomoclinicCyclicity";
    case VerdictKind::NoAnalyticIIF: return "NoAnalyticIIF";
    case VerdictKind::Undecided: return "Undecided";
  }
  return "?";
}

}  // namespace

std::string CyclicityVerdict::to_text() const {
  std::ostringstream os;
  os << "verdict: " << kind_name(kind);
  if (kind == VerdictKind::LimitCycleMultiplicity) os << "(" << m << ")";
  if (kind == VerdictKind::HomoclinicCyclicity) os << "(" << cyclicity << ", " << branch << ")";
  if (kind == VerdictKind::Undecided) os << " [" << reason << "]";
  os << "\nrule: " << rule << "\n";
  for (const auto& e : evidence) os << "evidence: " << e << "\n";
  return os.str();
}

std::string MapFormDescriptor::to_text() const {
  std::ostringstream os;
  os << "return-map case (" << case_id << "): " << leading_form << "\n";
  if (bound)
    os << "limit cycles bifurcating: at most " << *bound << "\n";
  else
    os << "no upper bound\n";
  if (!note.empty()) os << note << "\n";
  return os.str();
}

CyclicityVerdict limit_cycle_verdict(double m_or_rho, bool leading_ok,
                                     std::optional<double> return_map_deviation, double tol) {
  CyclicityVerdict v;
  std::ostringstream ev;
  ev << "vanishing order rho = " << m_or_rho << ", leading coefficient nonvanishing = "
     << (leading_ok ? "yes" : "no");
  v.evidence.push_back(ev.str());
  if (!leading_ok) {
    v.kind = VerdictKind::Undecided;
    v.reason = "leading coefficient of V vanishes somewhere on the orbit";
    v.rule = "multiplicity theorem requires v(s) != 0 along the orbit";
    return v;
  }
  double rounded = std::lround(m_or_rho);
  bool natural = std::abs(m_or_rho - rounded) < tol && rounded >= 1;
  if (std::abs(m_or_rho) < tol) {
    v.kind = VerdictKind::PeriodAnnulus;
    v.rule = "vanishing order 0 on a periodic orbit: continuum of periodic orbits";
    v.evidence.push_back("rho = 0");
    return v;
  }
  if (natural) {
    v.m = static_cast<int>(rounded);
    if (return_map_deviation) {
      std::ostringstream pr;
      pr << "return-map probe max |Pi(sigma)-sigma| = " << *return_map_deviation;
      v.evidence.push_back(pr.str());
      if (std::abs(*return_map_deviation) < tol) {
        v.kind = VerdictKind::PeriodAnnulus;
        v.rule = "integer vanishing order with identity return map: period annulus";
      } else {
        v.kind = VerdictKind::LimitCycleMultiplicity;
        v.rule = "integer vanishing order m with non-identity return map: "
                 "limit cycle of multiplicity m";
      }
    } else {
      v.kind = VerdictKind::Undecided;
      v.reason = "multiplicity " + std::to_string(v.m) +
                 " limit cycle or period annulus; no return-map probe supplied";
      v.rule = "integer vanishing order leaves the cycle/annulus dichotomy open";
    }
    return v;
  }
  if (m_or_rho > 1) {
    v.kind = VerdictKind::PeriodAnnulus;
    v.rule = "non-natural vanishing order rho > 1: continuum of periodic orbits";
    return v;
  }
  v.kind = VerdictKind::Undecided;
  v.reason = "vanishing order outside the theorem hypotheses";
  v.rule = "no rule applies";
  return v;
}

CyclicityVerdict homoclinic_cyclicity(int m, const SaddleInfo& saddle,
                                      const std::optional<SaddleQuantities>& alphas) {
  if (m < 1) throw std::invalid_argument("multiplicity must be at least 1");
  CyclicityVerdict v;
  v.kind = VerdictKind::HomoclinicCyclicity;
  v.m = m;
  std::ostringstream ev;
  ev << "m = " << m << ", saddle " << (saddle.strong ? "strong" : "weak")
     << ", r = " << saddle.ratio_r;
  v.evidence.push_back(ev.str());
  if (saddle.strong) {
    if (m != 1) throw std::runtime_error("inconsistent: strong saddle with m != 1");
    v.cyclicity = 1;
    v.branch = "strong saddle";
    v.rule = "strong saddle on the loop: multiplicity 1 and cyclicity 1";
    return v;
  }
  bool alpha_m_nonzero = false;
  if (alphas) {
    for (int i = 1; i < m; ++i)
      if (i <= static_cast<int>(alphas->alphas.size()) && !is_zero(alphas->alphas[i - 1]))
        throw std::runtime_error("contradiction: alpha_k != 0 for k < m");
    if (m <= static_cast<int>(alphas->alphas.size()))
      alpha_m_nonzero = !is_zero(alphas->alphas[m - 1]);
    v.evidence.push_back("alpha_" + std::to_string(m) +
                         (alpha_m_nonzero ? " != 0" : " = 0 (or not computed)"));
  } else {
    v.evidence.push_back("no saddle quantities supplied; alpha_m treated as 0");
  }
  if (alpha_m_nonzero) {
    if (m < 2) throw std::runtime_error("inconsistent: weak saddle with alpha_1 != 0");
    v.cyclicity = 2 * m - 1;
    v.branch = "alpha_m != 0";
    v.rule = "weak saddle, first nonzero saddle quantity alpha_m: cyclicity 2m-1";
  } else {
    v.cyclicity = 2 * m;
    v.branch = "alpha_m = 0";
    v.rule = "weak saddle, alpha_m = 0 (beta branch): cyclicity 2m";
  }
  return v;
}

MapFormDescriptor roussarie_asymptotics(double r, const SaddleQuantities& alphas,
                                        std::optional<double> beta1, std::optional<int> m,
                                        double tol) {
  MapFormDescriptor d;
  auto alpha_nonzero = [&](int k) {
    return k <= static_cast<int>(alphas.alphas.size()) && !is_zero(alphas.alphas[k - 1]);
  };
  if (std::abs(r - 1.0) > tol || alpha_nonzero(1)) {
    d.case_id = 1;
    std::ostringstream os;
    os << "Pi(sigma) = c sigma^" << r << " (1 + o(1))";
    d.leading_form = os.str();
    d.bound = 1;
    d.note = "hyperbolicity ratio r != 1 (strong saddle)";
    return d;
  }
  if (beta1 && std::abs(*beta1) > tol) {
    d.case_id = 2;
    std::ostringstream os;
    os << "Pi(sigma) = e^{" << *beta1 << "} sigma + o(sigma)";
    d.leading_form = os.str();
    d.bound = 2;
    d.note = "alpha_1 = 0, beta_1 != 0";
    return d;
  }
  // first nonzero saddle quantity beyond alpha_1
  int first = 0;
  for (int k = 2; k <= static_cast<int>(alphas.alphas.size()); ++k)
    if (alpha_nonzero(k)) {
      first = k;
      break;
    }
  if (first > 0) {
    int k = first - 1;  // alpha_{k+1} != 0, alpha_i = beta_i = 0 for i <= k
    d.case_id = 3;
    std::ostringstream os;
    os << "Pi(sigma) = sigma + alpha_" << first << " sigma^" << first << " log sigma + ...";
    d.leading_form = os.str();
    d.bound = 2 * k + 1;
    d.note = "first nonzero saddle quantity alpha_" + std::to_string(first);
    return d;
  }
  if (m && *m >= 1 && !alpha_nonzero(*m)) {
    // multiplicity m with alpha_m = 0: beta_m nonzero by the formal structure
    // of the inverse integrating factor on the loop (symbolic, not computed)
    d.case_id = 4;
    std::ostringstream os;
    os << "Pi(sigma) = sigma + beta_" << *m << " sigma^" << *m << " + o(sigma^" << *m << ")";
    d.leading_form = os.str();
    d.bound = 2 * (*m);
    d.note = "beta_" + std::to_string(*m) + " nonzero symbolically (loop with alpha_m = 0)";
    return d;
  }
  d.case_id = 5;
  d.leading_form = "Pi(sigma) = sigma";
  d.bound = std::nullopt;
  d.note = "all alpha_k and beta_k vanish: identity return map, no upper bound";
  return d;
}

bool existence_obstruction(const SaddleInfo& saddle, const ResonantNormalForm& nf) {
  if (!saddle.resonance) return false;
  auto [p, q] = *saddle.resonance;
  return saddle.strong && p != q && nf.delta != 0;
}

PerturbationWitness perturbation_witness(int n, const Rational& eps,
                                         const std::vector<Rational>& a, const OdeOptions& opts) {
  if (n < 1 || static_cast<int>(a.size()) != n)
    throw std::invalid_argument("constraint violated: need n distinct oval parameters");
  const Rational bound(4, 27);
  for (int i = 0; i < n; ++i) {
    Rational prod = a[i] * eps;
    // a_i*eps = 0 is admitted as the unperturbed control case: the "oval"
    // degenerates to the loop itself, so its certification must fail.
    if (prod < 0 || prod >= bound)
      throw std::invalid_argument("constraint violated: need 0 < a_i*eps < 4/27");
    for (int j = i + 1; j < n; ++j)
      if (a[i] == a[j]) throw std::invalid_argument("constraint violated: a_i must be distinct");
  }

  RPoly x = RPoly::var_x(), y = RPoly::var_y();
  RPoly f = y * y - x * x + x * x * x;
  RPoly prod = RPoly::constant(Rational(1));
  for (int i = 0; i < n; ++i) prod *= f + RPoly::constant(a[i] * eps);
  PerturbationWitness w{PlanarSystem(y.scaled(Rational(-2)),
                                     x.scaled(Rational(-2)) + (x * x).scaled(Rational(3)) +
                                         (y * prod).scaled(eps)),
                        {},
                        true};

  for (int i = 0; i < n; ++i) {
    OvalCertificate cert;
    cert.a = a[i];
    cert.oval = f + RPoly::constant(a[i] * eps);
    auto cof = invariant_curve_cofactor(w.sys, cert.oval);
    cert.invariant_ok = cof.has_value();
    if (cof) cert.cofactor = *cof;
    // witness point on the oval: x = 2/3 maximizes x^2 - x^3 at 4/27
    cert.witness_x = 2.0 / 3.0;
    cert.witness_y = std::sqrt(to_double(bound - a[i] * eps));
    if (cert.invariant_ok) {
      Section sec = Section::make(w.sys, cert.witness_x, cert.witness_y, 0.0, 1.0, 0);
      try {
        cert.exponent = characteristic_exponent(w.sys, cert.witness_x, cert.witness_y, sec, opts);
        cert.hyperbolic = std::abs(cert.exponent) > 1e3 * opts.rel_tol;
      } catch (const std::exception&) {
        cert.hyperbolic = false;  // e.g. the degenerate eps = 0 loop never returns
      }
    }
    w.all_certified = w.all_certified && cert.invariant_ok && cert.hyperbolic;
    w.certificates.push_back(cert);
  }
  return w;
}

}  // namespace iif
