#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iif/corpus.hpp"
#include "iif/system.hpp"

#include <random>

using namespace iif;

TEST_CASE("construction rejects the zero field") {
  CHECK_THROWS_WITH(PlanarSystem(RPoly(), RPoly()), "vector field is identically zero");
  CHECK_NOTHROW(PlanarSystem(RPoly::var_x(), RPoly()));
}

TEST_CASE("divergence agrees with the Jacobian trace everywhere") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  for (const auto& entry : corpus()) {
    PlanarSystem sys = bind_system(entry.system, entry.default_binding);
    RPoly div = divergence(sys);
    for (int rep = 0; rep < 5; ++rep) {
      Rational xv(num(rng), den(rng)), yv(num(rng), den(rng));
      JacobianInfo j = {};
      j.m = {sys.p.dx().eval(xv, yv), sys.p.dy().eval(xv, yv), sys.q.dx().eval(xv, yv),
             sys.q.dy().eval(xv, yv)};
      CHECK(div.eval(xv, yv) == j.m[0] + j.m[3]);
    }
  }
}

TEST_CASE("exact Jacobian data at singular points") {
  SUBCASE("Hamiltonian fish saddle at the origin") {
    JacobianInfo j = jacobian_exact(fish(), Rational(0), Rational(0));
    CHECK(j.m == std::array<Rational, 4>{Rational(0), Rational(-2), Rational(-2), Rational(0)});
    CHECK(j.trace == Rational(0));
    CHECK(j.det == Rational(-4));
    CHECK(j.real_eigenvalues);
    CHECK(j.rational_eigenvalues);
    CHECK(j.l1 == QuadExt(Rational(2)));
    CHECK(j.l2 == QuadExt(Rational(-2)));
  }
  SUBCASE("strong 1:3 saddle") {
    JacobianInfo j = jacobian_exact(andronov_strong_loop(), Rational(0), Rational(0));
    CHECK(j.trace == Rational(-2));
    CHECK(j.l1 == QuadExt(Rational(1)));
    CHECK(j.l2 == QuadExt(Rational(-3)));
    CHECK(j.rational_eigenvalues);
  }
  SUBCASE("quadratic-extension eigenvalues at the loop-family saddle") {
    PlanarSystem sys = loop_factor(1, RPoly::constant(Rational(1)), RPoly::constant(Rational(1)));
    JacobianInfo j = jacobian_exact(sys, Rational(1), Rational(0));
    CHECK(j.real_eigenvalues);
    CHECK_FALSE(j.rational_eigenvalues);
    CHECK(to_double(j.l1) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(to_double(j.l1 + j.l2) == doctest::Approx(to_double(j.trace)).epsilon(1e-14));
  }
}

TEST_CASE("singular point verification") {
  PlanarSystem sys = fish();
  SUBCASE("exact rational check") {
    SingularPoint sp = verify_singular(sys, Rational(0), Rational(0));
    CHECK(sp.exact);
    CHECK(sp.divergence_value == 0.0);
    REQUIRE(sp.exact_jac.has_value());
    CHECK(sp.exact_jac->det == Rational(-4));
    CHECK_THROWS_WITH(verify_singular(sys, Rational(1), Rational(1)), "not singular");
  }
  SUBCASE("floating check honors its tolerance") {
    SingularPoint sp = verify_singular(sys, 1e-12, 0.0, 1e-10);
    CHECK_FALSE(sp.exact);
    CHECK(sp.jac[1] == doctest::Approx(-2.0));
    CHECK_THROWS_WITH(verify_singular(sys, 1e-6, 0.0, 1e-10), "not singular");
  }
  SUBCASE("the second fish equilibrium is a center, still singular") {
    CHECK_NOTHROW(verify_singular(sys, Rational(2, 3), Rational(0)));
  }
}

TEST_CASE("invariant curve cofactors") {
  SUBCASE("Hamiltonian level set has cofactor zero") {
    auto c = invariant_curve_cofactor(fish(), fish_curve());
    REQUIRE(c.has_value());
    CHECK(c->is_zero_poly());
  }
  SUBCASE("loop of the strong-saddle quadratic system") {
    auto c = invariant_curve_cofactor(andronov_strong_loop(), andronov_curve());
    REQUIRE(c.has_value());
    RPoly expected = RPoly::var_x().scaled(Rational(3)) - RPoly::constant(Rational(2));
    CHECK(*c == expected);
  }
  SUBCASE("ellipse of the cubic focus family") {
    PlanarSystem sys = focus_ellipse(Rational(1, 2), Rational(-2), Rational(1));
    RPoly x = RPoly::var_x(), y = RPoly::var_y();
    RPoly ellipse = RPoly::constant(Rational(1)) + (x * x + y * y).scaled(Rational(-2));
    auto c = invariant_curve_cofactor(sys, ellipse);
    REQUIRE(c.has_value());
    CHECK(lie_derivative(sys, ellipse) == *c * ellipse);
  }
  SUBCASE("non-invariant curves are rejected") {
    CHECK_FALSE(invariant_curve_cofactor(fish(), RPoly::var_x()).has_value());
    CHECK_THROWS(invariant_curve_cofactor(fish(), RPoly()));
  }
}

TEST_CASE("Lie derivative is a derivation") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-5, 5);
  PlanarSystem sys = andronov_strong_loop();
  for (int rep = 0; rep < 8; ++rep) {
    RPoly f, g;
    for (int t = 0; t < 4; ++t) {
      f.add_term(static_cast<int>(rng() % 3), static_cast<int>(rng() % 3), Rational(num(rng)));
      g.add_term(static_cast<int>(rng() % 3), static_cast<int>(rng() % 3), Rational(num(rng)));
    }
    CHECK(lie_derivative(sys, f * g) == lie_derivative(sys, f) * g + f * lie_derivative(sys, g));
  }
}
