#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iif/corpus.hpp"
#include "iif/verdict.hpp"

#include <cmath>

using namespace iif;

namespace {

SaddleInfo saddle_at(const PlanarSystem& sys, long x0, long y0) {
  return classify_saddle(sys, verify_singular(sys, Rational(x0), Rational(y0)));
}

RPoly one() { return RPoly::constant(Rational(1)); }

}  // namespace

TEST_CASE("homoclinic cyclicity from loop multiplicity and saddle data") {
  SUBCASE("weak saddle, alpha_1 = 0: cyclicity 2m") {
    PlanarSystem sys = loop_factor(1, one(), one());
    SaddleInfo info = saddle_at(sys, 1, 0);
    SaddleQuantities sq = saddle_quantities(sys, info, 3);
    CyclicityVerdict v = homoclinic_cyclicity(1, info, sq);
    CHECK(v.kind == VerdictKind::HomoclinicCyclicity);
    CHECK(v.cyclicity == 2);
    CHECK(v.m == 1);
    CHECK(v.branch == "alpha_m = 0");
    CHECK_FALSE(v.evidence.empty());
    CHECK_FALSE(v.to_text().empty());
  }
  SUBCASE("weak saddle, first nonzero alpha_m: cyclicity 2m - 1") {
    RPoly x = RPoly::var_x(), y = RPoly::var_y();
    RPoly u2 = (x * y) * (x * y);
    PlanarSystem syn(x * (one() + u2), (y * (one() + u2.scaled(Rational(2)))).scaled(Rational(-1)));
    SaddleInfo info = saddle_at(syn, 0, 0);
    SaddleQuantities sq = saddle_quantities(syn, info, 3);
    REQUIRE(sq.first_nonzero == 3);
    CyclicityVerdict v = homoclinic_cyclicity(3, info, sq);
    CHECK(v.cyclicity == 5);
    CHECK(v.branch == "alpha_m != 0");
    // claiming m = 2 instead: alpha_2 = 0 is consistent, beta branch
    CHECK(homoclinic_cyclicity(2, info, sq).cyclicity == 4);
    // claiming m = 4: alpha_3 != 0 below m contradicts the claim
    CHECK_THROWS_WITH(homoclinic_cyclicity(4, info, sq), "contradiction: alpha_k != 0 for k < m");
  }
  SUBCASE("strong saddle forces multiplicity 1 and cyclicity 1") {
    SaddleInfo info = saddle_at(andronov_strong_loop(), 0, 0);
    CyclicityVerdict v = homoclinic_cyclicity(1, info, std::nullopt);
    CHECK(v.cyclicity == 1);
    CHECK(v.branch == "strong saddle");
    CHECK_THROWS_WITH(homoclinic_cyclicity(2, info, std::nullopt),
                      "inconsistent: strong saddle with m != 1");
  }
  SUBCASE("input guards") {
    SaddleInfo weak = saddle_at(fish(), 0, 0);
    CHECK_THROWS_AS(homoclinic_cyclicity(0, weak, std::nullopt), std::invalid_argument);
    SaddleQuantities bad;
    bad.alphas = {QuadExt(Rational(7))};
    bad.first_nonzero = 1;
    CHECK_THROWS_WITH(homoclinic_cyclicity(1, weak, bad),
                      "inconsistent: weak saddle with alpha_1 != 0");
  }
}

TEST_CASE("asymptotic form of the Dulac return map") {
  PlanarSystem fs = fish();
  SaddleInfo fi = saddle_at(fs, 0, 0);
  SaddleQuantities all_zero = saddle_quantities(fs, fi, 3);

  SUBCASE("case 1: non-unit hyperbolicity ratio") {
    MapFormDescriptor d = roussarie_asymptotics(3.0, all_zero);
    CHECK(d.case_id == 1);
    CHECK(d.bound == 1);
  }
  SUBCASE("case 2: nonzero beta_1") {
    MapFormDescriptor d = roussarie_asymptotics(1.0, all_zero, -4.0 * std::acos(-1.0));
    CHECK(d.case_id == 2);
    CHECK(d.bound == 2);
    CHECK(d.leading_form.find("sigma + o(sigma)") != std::string::npos);
  }
  SUBCASE("case 3: first nonzero saddle quantity, logarithmic term") {
    RPoly x = RPoly::var_x(), y = RPoly::var_y();
    RPoly u2 = (x * y) * (x * y);
    PlanarSystem syn(x * (one() + u2), (y * (one() + u2.scaled(Rational(2)))).scaled(Rational(-1)));
    SaddleQuantities sq = saddle_quantities(syn, saddle_at(syn, 0, 0), 3);
    MapFormDescriptor d = roussarie_asymptotics(1.0, sq);
    CHECK(d.case_id == 3);
    CHECK(d.bound == 5);  // 2k + 1 with alpha_{k+1} = alpha_3
    CHECK(d.leading_form.find("log sigma") != std::string::npos);
  }
  SUBCASE("case 4: alpha_m = 0 with symbolic beta_m") {
    MapFormDescriptor d = roussarie_asymptotics(1.0, all_zero, std::nullopt, 2);
    CHECK(d.case_id == 4);
    CHECK(d.bound == 4);
    CHECK(d.leading_form.find("beta_2") != std::string::npos);
  }
  SUBCASE("case 5: every computed quantity vanishes") {
    MapFormDescriptor d = roussarie_asymptotics(1.0, all_zero);
    CHECK(d.case_id == 5);
    CHECK_FALSE(d.bound.has_value());
    CHECK(d.leading_form == "Pi(sigma) = sigma");
    CHECK_FALSE(d.to_text().empty());
  }
}

TEST_CASE("limit cycle versus period annulus dichotomy") {
  CyclicityVerdict cyc = limit_cycle_verdict(1.0, true, 0.15);
  CHECK(cyc.kind == VerdictKind::LimitCycleMultiplicity);
  CHECK(cyc.m == 1);

  CyclicityVerdict ann = limit_cycle_verdict(1.0, true, 1e-13);
  CHECK(ann.kind == VerdictKind::PeriodAnnulus);

  // a nearly-integer estimated order rounds under the caller-supplied tolerance
  CHECK(limit_cycle_verdict(1.0000004, true, 0.15, 1e-6).kind ==
        VerdictKind::LimitCycleMultiplicity);

  CHECK(limit_cycle_verdict(0.0, true).kind == VerdictKind::PeriodAnnulus);
  CHECK(limit_cycle_verdict(1.49, true).kind == VerdictKind::PeriodAnnulus);

  CyclicityVerdict open_d = limit_cycle_verdict(2.0, true);
  CHECK(open_d.kind == VerdictKind::Undecided);  // no probe: dichotomy open
  CHECK(limit_cycle_verdict(1.0, false).kind == VerdictKind::Undecided);
}

TEST_CASE("obstruction to any analytic factor near the loop") {
  PlanarSystem an = andronov_strong_loop();
  SaddleInfo ai = saddle_at(an, 0, 0);
  ResonantNormalForm nf = resonant_normal_form(an, ai, 10);
  CHECK(existence_obstruction(ai, nf));

  PlanarSystem fs = fish();
  SaddleInfo fi = saddle_at(fs, 0, 0);
  ResonantNormalForm fnf = resonant_normal_form(fs, fi, 10);
  CHECK_FALSE(existence_obstruction(fi, fnf));
}

TEST_CASE("perturbation witness with certified invariant ovals") {
  std::vector<Rational> a{Rational(1), Rational(2), Rational(3)};
  PerturbationWitness w = perturbation_witness(3, Rational(1, 100), a);
  REQUIRE(w.certificates.size() == 3);
  for (const OvalCertificate& c : w.certificates) {
    CHECK(c.invariant_ok);  // exact polynomial cofactor division
    CHECK_FALSE(c.cofactor.is_zero_poly());
    CHECK(std::abs(c.oval.eval_d(c.witness_x, c.witness_y)) < 1e-9);
    CHECK(c.hyperbolic);
    CHECK(std::abs(c.exponent) > 1e-7);
    CHECK(std::abs(c.exponent) < 2e-6);  // O(eps^n) scale for eps = 1/100
  }
  CHECK(w.all_certified);
  // nested cycles alternate stability
  CHECK(w.certificates[0].exponent > 0);
  CHECK(w.certificates[1].exponent < 0);
  CHECK(w.certificates[2].exponent > 0);

  SUBCASE("constraints on the oval parameters") {
    CHECK_THROWS_WITH(perturbation_witness(3, Rational(1, 10), a),
                      "constraint violated: need 0 < a_i*eps < 4/27");
    CHECK_THROWS_WITH(perturbation_witness(3, Rational(-1, 100), a),
                      "constraint violated: need 0 < a_i*eps < 4/27");
    std::vector<Rational> dup{Rational(1), Rational(1), Rational(2)};
    CHECK_THROWS_WITH(perturbation_witness(3, Rational(1, 100), dup),
                      "constraint violated: a_i must be distinct");
    CHECK_THROWS_WITH(perturbation_witness(2, Rational(1, 100), a),
                      "constraint violated: need n distinct oval parameters");
  }

  SUBCASE("eps = 0 degenerates every oval to the loop and fails certification") {
    PerturbationWitness w0 = perturbation_witness(3, Rational(0), a);
    CHECK_FALSE(w0.all_certified);
    for (const OvalCertificate& c : w0.certificates) {
      CHECK(c.invariant_ok);  // f itself stays invariant
      CHECK_FALSE(c.hyperbolic);
    }
  }
}
