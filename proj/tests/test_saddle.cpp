#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iif/corpus.hpp"
#include "iif/saddle.hpp"

#include <cmath>

using namespace iif;

namespace {

SaddleInfo saddle_at(const PlanarSystem& sys, long x0, long y0) {
  return classify_saddle(sys, verify_singular(sys, Rational(x0), Rational(y0)));
}

RPoly one() { return RPoly::constant(Rational(1)); }

// dx = x (1 + a1 xy), dy = -y (1 + b1 xy): alpha_2 = a1 - b1 by definition.
PlanarSystem nf_input(const Rational& a1, const Rational& b1) {
  RPoly x = RPoly::var_x(), y = RPoly::var_y(), xy = x * y;
  return PlanarSystem(x * (one() + xy.scaled(a1)), (y * (one() + xy.scaled(b1))).scaled(Rational(-1)));
}

}  // namespace

TEST_CASE("saddle classification") {
  SUBCASE("weak 1:1 rational saddle") {
    SaddleInfo info = saddle_at(fish(), 0, 0);
    CHECK_FALSE(info.strong);
    CHECK(info.lambda == 2.0);
    CHECK(info.mu == -2.0);
    CHECK(info.ratio_r == 1.0);
    CHECK(info.rational_eigenvalues);
    REQUIRE(info.resonance.has_value());
    CHECK(*info.resonance == std::pair<int, int>(1, 1));
    CHECK_FALSE(info.numeric_resonance);
    // eigenvectors of [[0,-2],[-2,0]]: (1,-1) and (1,1) directions
    CHECK(std::abs(info.evec_lambda[0] + info.evec_lambda[1]) < 1e-12);
    CHECK(std::abs(info.evec_mu[0] - info.evec_mu[1]) < 1e-12);
  }
  SUBCASE("strong 1:3 resonant saddle") {
    SaddleInfo info = saddle_at(andronov_strong_loop(), 0, 0);
    CHECK(info.strong);
    CHECK(info.lambda == 1.0);
    CHECK(info.mu == -3.0);
    CHECK(info.ratio_r == 3.0);
    REQUIRE(info.resonance.has_value());
    CHECK(*info.resonance == std::pair<int, int>(1, 3));
    CHECK(info.lambda_exact == Rational(1));
    CHECK(info.mu_exact == Rational(-3));
  }
  SUBCASE("weak saddle with quadratic-extension eigenvalues") {
    PlanarSystem sys = loop_factor(1, one(), one());
    SaddleInfo info = saddle_at(sys, 1, 0);
    CHECK_FALSE(info.strong);
    CHECK_FALSE(info.rational_eigenvalues);
    CHECK(info.lambda == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(info.ratio_r == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(info.resonance.has_value());
    CHECK(*info.resonance == std::pair<int, int>(1, 1));
  }
  SUBCASE("nonresonant saddle has no (p, q)") {
    PlanarSystem sys(RPoly::var_x() + RPoly::var_y(), RPoly::var_x());
    SaddleInfo info = saddle_at(sys, 0, 0);
    CHECK_FALSE(info.resonance.has_value());
    CHECK(info.ratio_r == doctest::Approx((std::sqrt(5.0) - 1) / (std::sqrt(5.0) + 1)));
  }
  SUBCASE("centers are rejected") {
    PlanarSystem sys = fish();
    SingularPoint center = verify_singular(sys, Rational(2, 3), Rational(0));
    CHECK_THROWS_WITH(classify_saddle(sys, center), "not a hyperbolic saddle");
  }
}

TEST_CASE("saddle quantities from the Poincare-Dulac normal form") {
  SUBCASE("normal-form input is read back exactly") {
    PlanarSystem sys = nf_input(Rational(2), Rational(5));
    SaddleQuantities sq = saddle_quantities(sys, saddle_at(sys, 0, 0), 2);
    REQUIRE(sq.alphas.size() == 3);
    CHECK(is_zero(sq.alphas[0]));
    CHECK(sq.alphas[1] == QuadExt(Rational(-3)));
    CHECK(is_zero(sq.alphas[2]));
    CHECK(sq.first_nonzero == 2);
    CHECK(sq.alpha(2) == Rational(-3));
    CHECK(sq.alpha(1) == Rational(0));
    CHECK_THROWS_AS(sq.alpha(9), std::out_of_range);
    CHECK_FALSE(sq.report.empty());
  }
  SUBCASE("linear saddle has no nonzero quantities") {
    PlanarSystem sys(RPoly::var_x(), RPoly::var_y().scaled(Rational(-1)));
    SaddleQuantities sq = saddle_quantities(sys, saddle_at(sys, 0, 0), 3);
    for (const QuadExt& a : sq.alphas) CHECK(is_zero(a));
    CHECK_FALSE(sq.first_nonzero.has_value());
  }
  SUBCASE("integrable loop saddle: all quantities vanish in the extension field") {
    PlanarSystem sys = loop_factor(1, one(), one());
    SaddleQuantities sq = saddle_quantities(sys, saddle_at(sys, 1, 0), 3);
    REQUIRE(sq.alphas.size() == 4);
    for (const QuadExt& a : sq.alphas) CHECK(is_zero(a));
    CHECK_FALSE(sq.first_nonzero.has_value());
  }
  SUBCASE("invariant under time rescaling and unimodular changes") {
    PlanarSystem sys = nf_input(Rational(2), Rational(5));
    PlanarSystem rescaled(sys.p.scaled(Rational(2)), sys.q.scaled(Rational(2)));
    SaddleQuantities sq2 = saddle_quantities(rescaled, saddle_at(rescaled, 0, 0), 2);
    CHECK(sq2.alphas[1] == QuadExt(Rational(-3)));
    CHECK(sq2.first_nonzero == 2);

    // shear X = x + y, Y = y; the vanishing pattern and |alpha_2| survive
    auto conv = [](const Rational& c) { return RPoly::constant(c); };
    RPoly X = RPoly::var_x(), Y = RPoly::var_y();
    RPoly px = sys.p.eval_gen(X - Y, Y, conv), qx = sys.q.eval_gen(X - Y, Y, conv);
    PlanarSystem sheared(px + qx, qx);
    SaddleQuantities sq3 = saddle_quantities(sheared, saddle_at(sheared, 0, 0), 2);
    CHECK(is_zero(sq3.alphas[0]));
    CHECK(sq3.first_nonzero == 2);
    CHECK(sq3.alphas[1] * sq3.alphas[1] == QuadExt(Rational(9)));
  }
  SUBCASE("guard rails") {
    PlanarSystem sys = nf_input(Rational(2), Rational(5));
    SaddleInfo info = saddle_at(sys, 0, 0);
    CHECK_THROWS_WITH(saddle_quantities(sys, info, 0), "K outside configured maximum");
    CHECK_THROWS_WITH(saddle_quantities(sys, info, 9), "K outside configured maximum");
    SaddleInfo strong = saddle_at(andronov_strong_loop(), 0, 0);
    CHECK_THROWS_WITH(saddle_quantities(andronov_strong_loop(), strong, 2),
                      "strong saddle: quantities undefined beyond alpha_1");
  }
}

TEST_CASE("resonant orbital normal form at the strong 1:3 saddle") {
  PlanarSystem sys = andronov_strong_loop();
  SaddleInfo info = saddle_at(sys, 0, 0);

  SUBCASE("retained coefficients and orbital reduction at degree 10") {
    ResonantNormalForm nf = resonant_normal_form(sys, info, 10);
    CHECK(nf.p == 1);
    CHECK(nf.q == 3);
    REQUIRE(nf.k_max >= 2);
    CHECK(nf.A[0] == QuadExt(Rational(2275, 768)));
    CHECK(nf.B[0] == QuadExt(Rational(7735, 2304)));
    CHECK(nf.c[0] == QuadExt(Rational(-455, 1152)));
    CHECK(nf.c[1] == QuadExt(Rational(176879885, 42467328)));
    CHECK(nf.delta == -1);
    CHECK(nf.ell == 1);
    REQUIRE(nf.a_available);
    CHECK(nf.a_coeff == QuadExt(Rational(388747, 14560)));
    CHECK_FALSE(nf.report.empty());
  }

  SUBCASE("orbital invariants are stable under deeper truncation") {
    ResonantNormalForm lo = resonant_normal_form(sys, info, 10);
    ResonantNormalForm hi = resonant_normal_form(sys, info, 15);
    REQUIRE(hi.k_max >= lo.k_max);
    for (int k = 0; k < lo.k_max; ++k) {
      CHECK(lo.A[k] == hi.A[k]);
      CHECK(lo.B[k] == hi.B[k]);
      CHECK(lo.c[k] == hi.c[k]);
    }
    CHECK(lo.delta == hi.delta);
    CHECK(lo.ell == hi.ell);
    CHECK(lo.a_coeff == hi.a_coeff);
  }

  SUBCASE("weak resonant saddle of the Hamiltonian is orbitally linearizable") {
    PlanarSystem fs = fish();
    SaddleInfo fi = saddle_at(fs, 0, 0);
    ResonantNormalForm nf = resonant_normal_form(fs, fi, 10);
    CHECK(nf.p == 1);
    CHECK(nf.q == 1);
    CHECK(nf.delta == 0);
    for (const QuadExt& c : nf.c) CHECK(is_zero(c));
  }

  SUBCASE("rejects nonresonant input") {
    PlanarSystem golden(RPoly::var_x() + RPoly::var_y(), RPoly::var_x());
    SaddleInfo gi = saddle_at(golden, 0, 0);
    CHECK_THROWS_WITH(resonant_normal_form(golden, gi, 10), "nonresonant saddle");
  }
}

TEST_CASE("separatrix branch series") {
  PlanarSystem sys = fish();
  SaddleInfo info = saddle_at(sys, 0, 0);
  RPoly su = separatrix_series(sys, info, SeparatrixBranch::Unstable, 8);
  RPoly ss = separatrix_series(sys, info, SeparatrixBranch::Stable, 8);
  CHECK(su.eval_d(0.0, 0.0) == 0.0);

  // exact branches of y^2 = x^2 (1 - x): y = -+ x sqrt(1 - x); the truncation
  // error decays like t^(degree+1)
  auto resid = [](const RPoly& s, double t, double y) { return std::abs(s.eval_d(t, y)); };
  CHECK(resid(su, 0.01, -0.01 * std::sqrt(0.99)) < 1e-15);
  CHECK(resid(ss, 0.01, 0.01 * std::sqrt(0.99)) < 1e-15);
  CHECK(resid(su, 0.05, -0.05 * std::sqrt(0.95)) < 1e-10);
  CHECK(resid(ss, 0.05, 0.05 * std::sqrt(0.95)) < 1e-10);

  SUBCASE("strong saddle branches inside the loop curve") {
    PlanarSystem an = andronov_strong_loop();
    SaddleInfo ai = saddle_at(an, 0, 0);
    RPoly s = separatrix_series(an, ai, SeparatrixBranch::Unstable, 8);
    CHECK(std::abs(s.eval_d(0.02, 0.02 * std::sqrt(0.98))) < 1e-12);
  }
  SUBCASE("degree guard") {
    CHECK_THROWS_WITH(separatrix_series(sys, info, SeparatrixBranch::Unstable, 1),
                      "degree must be at least 2");
  }
}

TEST_CASE("transverse vanishing order across a separatrix") {
  PlanarSystem sys = fish();
  SaddleInfo info = saddle_at(sys, 0, 0);
  for (int n : {1, 2, 3}) {
    TransverseMultiplicity tm =
        transverse_multiplicity(sys, info, fish_iif(n).v, SeparatrixBranch::Unstable, 10);
    CHECK(tm.m == n);
    CHECK(tm.order_valid_to >= 5);
  }
  PlanarSystem an = andronov_strong_loop();
  SaddleInfo ai = saddle_at(an, 0, 0);
  for (auto br : {SeparatrixBranch::Unstable, SeparatrixBranch::Stable}) {
    TransverseMultiplicity tm = transverse_multiplicity(an, ai, andronov_curve(), br, 10);
    CHECK(tm.m == 1);
  }
}

TEST_CASE("local factorization of the factor at a saddle") {
  RPoly x = RPoly::var_x(), y = RPoly::var_y();

  SUBCASE("resonant strong saddle pattern (1 + kq, 1 + kp)") {
    PlanarSystem sys(x, y.scaled(Rational(-2)));
    SaddleInfo info = saddle_at(sys, 0, 0);
    LocalFactorization k0 = local_iif_factorization(sys, IIF(x * y), info, x, y);
    CHECK(k0.m1 == 1);
    CHECK(k0.m2 == 1);
    CHECK(k0.balance_ok);
    CHECK(k0.case_ok);
    CHECK(k0.unit_nonzero);
    LocalFactorization k1 = local_iif_factorization(sys, IIF(x.pow(3) * y.pow(2)), info, x, y);
    CHECK(k1.m1 == 3);
    CHECK(k1.m2 == 2);
    CHECK(k1.balance_ok);
    CHECK(k1.case_ok);
    CHECK(k1.case_label == "resonant strong saddle: V = f_lambda^{1+kq} f_mu^{1+kp} u, k = 1");

    // the lambda-branch factor must vanish on the lambda separatrix
    CHECK_THROWS_WITH(local_iif_factorization(sys, IIF(x * y), info, y, x),
                      "separatrix factor mismatch");
    CHECK_THROWS_WITH(local_iif_factorization(sys, IIF(x * y), info, x + y, y),
                      "separatrix factor mismatch");
  }

  SUBCASE("weak saddle pattern (m, m) with both branches in one curve") {
    RPoly f = loop_factor_curve();
    for (int m : {1, 2}) {
      PlanarSystem sys = loop_factor(m, one(), one());
      SaddleInfo info = saddle_at(sys, 1, 0);
      LocalFactorization lf = local_iif_factorization(sys, loop_factor_iif(m, one()), info, f, f);
      CHECK(lf.m1 == m);
      CHECK(lf.m2 == m);
      CHECK(lf.balance_ok);
      CHECK(lf.case_ok);
      CHECK(lf.unit_nonzero);
      CHECK(lf.case_label == "weak saddle: V = f_lambda^m f_mu^m u");
    }
  }

  SUBCASE("nonresonant saddle pattern (1, 1)") {
    PlanarSystem sys(x + y, x);
    SaddleInfo info = saddle_at(sys, 0, 0);
    RPoly cone = x * x - x * y - y * y;  // contains both eigendirections
    IIF v(cone.scaled(Rational(-1)));
    REQUIRE(verify_iif(sys, v.v).is_zero_poly());
    LocalFactorization lf = local_iif_factorization(sys, v, info, cone, cone);
    CHECK(lf.m1 == 1);
    CHECK(lf.m2 == 1);
    CHECK(lf.balance_ok);
    CHECK(lf.case_ok);
    CHECK(lf.case_label == "nonresonant saddle: V = f_lambda f_mu u");
  }
}

TEST_CASE("consistency of quantities with a claimed multiplicity") {
  PlanarSystem sys = loop_factor(1, one(), one());
  SaddleQuantities sq = saddle_quantities(sys, saddle_at(sys, 1, 0), 3);
  CHECK_FALSE(formal_iif_consistency(sq, 1));  // alpha_1 = 0

  RPoly x = RPoly::var_x(), y = RPoly::var_y();
  RPoly u2 = (x * y) * (x * y);
  PlanarSystem syn(x * (one() + u2), (y * (one() + u2.scaled(Rational(2)))).scaled(Rational(-1)));
  SaddleQuantities sq3 = saddle_quantities(syn, saddle_at(syn, 0, 0), 3);
  CHECK(sq3.first_nonzero == 3);
  CHECK(formal_iif_consistency(sq3, 3));   // alpha_1 = alpha_2 = 0, alpha_3 != 0
  CHECK_FALSE(formal_iif_consistency(sq3, 1));

  SUBCASE("claims contradicted by a lower nonzero quantity are rejected") {
    SaddleQuantities handmade;
    handmade.alphas = {QuadExt(Rational(1)), QuadExt(Rational(0))};
    handmade.first_nonzero = 1;
    CHECK_THROWS_WITH(formal_iif_consistency(handmade, 2),
                      "contradiction: alpha_k != 0 for k < m");
    CHECK_THROWS_WITH(formal_iif_consistency(sq3, 9),
                      "insufficient saddle quantities for the requested multiplicity");
    CHECK_THROWS_AS(formal_iif_consistency(sq3, 0), std::invalid_argument);
  }
}
