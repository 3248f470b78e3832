#include <cmath>
#include <filesystem>

#include "ctns/coefficients.hpp"
#include "ctns/error.hpp"
#include "doctest.h"

using namespace ctns;

namespace {

CoefficientSet exponential_sensitivity(double s0) {
  CoefficientSet c;
  c.family = "f=s, chi=e^s";
  c.f = ScalarFunction::power(1.0);
  c.chi = {[](double s) { return std::exp(s); }, [](double s) { return std::exp(s); },
           [](double s) { return std::exp(s); }};
  c.s0 = s0;
  return c;
}

CoefficientSet saturating_sensitivity(double s0) {
  // g = s / (1 + s): increasing, concave, and chi f = s + s^2 is convex
  CoefficientSet c;
  c.family = "f=s, chi=1+s";
  c.f = ScalarFunction::power(1.0);
  c.chi = {[](double s) { return 1.0 + s; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
  c.s0 = s0;
  return c;
}

}  // namespace

TEST_CASE("prototype transforms vanish at s = 1 and match closed forms") {
  const DerivedChemo d = derive_chemo(prototype(1.0, 4.0), 64);
  CHECK(d.psi(1.0) == 0.0);
  CHECK(d.rho(1.0) == 0.0);
  // closed-form antiderivatives 2 sqrt(s) and ln s
  CHECK(d.psi(4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.rho(4.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(d.cg_minus() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.cg_plus() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.g(0.3) == doctest::Approx(0.3));
  CHECK(d.g_prime(0.3) == doctest::Approx(1.0));
  CHECK(d.g_second(0.3) == 0.0);
}

TEST_CASE("tabulated Psi is uniformly accurate on [0.01, s0]") {
  for (double s0 : {1.0, 2.0, 4.0}) {
    const DerivedChemo d = derive_chemo(prototype(1.0, s0));
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double s = 0.01 + (s0 - 0.01) * i / 20000.0;
      worst = std::max(worst, std::abs(d.psi(s) - 2.0 * (std::sqrt(s) - 1.0)));
    }
    CHECK(worst <= 1e-8);
  }
  // chi0 scales Psi by sqrt(chi0) and rho by chi0; the linear interpolant
  // of rho is off by at most h^2 |rho''| / 8 ~ 2e-8 near s = 0.5
  const DerivedChemo d = derive_chemo(prototype(2.5, 3.0));
  CHECK(std::abs(d.psi(2.0) - 2.0 * std::sqrt(2.5) * (std::sqrt(2.0) - 1.0)) < 5e-8);
  CHECK(std::abs(d.rho(0.5) - 2.5 * std::log(0.5)) < 5e-8);
  // below the table the closed form takes over
  CHECK(d.psi(1e-9) == doctest::Approx(2.0 * std::sqrt(2.5) * (std::sqrt(1e-9) - 1.0)));
}

TEST_CASE("transforms anchored at 1 when s0 < 1") {
  const DerivedChemo d = derive_chemo(prototype(1.0, 0.5));
  CHECK(d.psi(0.25) == doctest::Approx(2.0 * (0.5 - 1.0)).epsilon(1e-10));
  CHECK(d.rho(0.25) == doctest::Approx(std::log(0.25)).epsilon(1e-10));
}

TEST_CASE("derive_chemo rejects degenerate inputs") {
  CHECK_THROWS_AS(derive_chemo(prototype(1.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(derive_chemo(prototype(1.0, 1.0), 8), InvalidArgument);
  CoefficientSet vanishing;
  vanishing.f = {[](double s) { return s * (1.0 - s) * (1.0 - s); }, {}, {}};
  vanishing.chi = ScalarFunction::constant(1.0);
  vanishing.s0 = 2.0;
  // s = 1 is the 9th of 17 samples, where g = 0
  CHECK_THROWS_AS(derive_chemo(vanishing, 17), InvalidArgument);
}

TEST_CASE("structural validator") {
  SUBCASE("prototype passes") {
    for (double chi0 : {0.5, 1.0, 3.0}) {
      const StructuralReport r = check_structural(prototype(chi0, 2.0));
      CHECK(r.passes);
      CHECK(r.violations.empty());
      CHECK(r.consistency.empty());
      CHECK(r.sample_grid.size() == 4096);
      CHECK(r.sample_grid.back() == 2.0);
    }
  }
  SUBCASE("exponential sensitivity fails the monotonicity of f/chi past s = 1") {
    const StructuralReport r = check_structural(exponential_sensitivity(2.0));
    CHECK_FALSE(r.passes);
    CHECK(r.flags(StructuralCondition::g_increasing));
    CHECK_FALSE(r.flags(StructuralCondition::g_concave));
    CHECK_FALSE(r.flags(StructuralCondition::chi_f_convex));
    for (const auto& v : r.violations) {
      CHECK(v.s >= 1.0 - 1e-3);
      // (f/chi)' = (1 - s) e^{-s}
      CHECK(v.value == doctest::Approx((1.0 - v.s) * std::exp(-v.s)));
    }
    CHECK(r.violations.back().s == 2.0);
  }
  SUBCASE("quadratic consumption fails strict positivity at the origin") {
    const StructuralReport r = check_structural(powerlaw(2.0, 1.0, 1.0));
    CHECK_FALSE(r.passes);
    REQUIRE(r.flags(StructuralCondition::g_increasing));
    CHECK(r.violations.front().condition == StructuralCondition::g_increasing);
    CHECK(r.violations.front().s == 0.0);
    CHECK(r.violations.front().value == 0.0);
    // g'' = 2 everywhere, so concavity fails too
    CHECK(r.flags(StructuralCondition::g_concave));
  }
  SUBCASE("saturating sensitivity passes, including the consumption sign") {
    const StructuralReport r = check_structural(saturating_sensitivity(3.0));
    CHECK(r.passes);
    CHECK(r.consistency.empty());
  }
}

TEST_CASE("consumption sign identity holds wherever the hypotheses hold") {
  for (const auto& c : {prototype(1.0, 2.0), prototype(4.0, 0.3), saturating_sensitivity(5.0)}) {
    const StructuralReport r = check_structural(c, 1024);
    REQUIRE(r.passes);
    const DerivedChemo d = derive_chemo(c, 1024);
    for (double s : r.sample_grid) {
      if (s == 0.0) continue;
      const double g = d.g(s);
      const double sign = c.f(s) * d.g_prime(s) / (2 * g * g) - c.f.d1(s) / g;
      CHECK(sign <= 1e-9);
      CHECK(d.cg_minus() * s <= g * (1 + 1e-14));
      CHECK(g <= d.cg_plus() * s * (1 + 1e-14));
    }
    CHECK(d.cg_minus() <= d.cg_plus());
    CHECK(d.cg_minus() > 0.0);
  }
}

TEST_CASE("tabulated families use finite differences") {
  const auto path = std::filesystem::path(CTNS_TEST_DATA_DIR) / "linear_table.csv";
  const CoefficientSet c = make_family("tabulated{" + path.string() + "}", 2.0);
  CHECK(c.family == "tabulated");
  CHECK_FALSE(c.f.has_derivatives());
  const DerivedChemo d = derive_chemo(c, 256);
  CHECK(d.g(1.0) == doctest::Approx(0.5));
  CHECK(d.g_prime(0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.g_prime(2.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(d.g_second(1.0)) < 1e-6);
  // chi = 2: Psi = 2 sqrt(2) (sqrt(s) - 1)
  CHECK(d.psi(1.5) == doctest::Approx(2.0 * std::sqrt(2.0) * (std::sqrt(1.5) - 1.0)).epsilon(1e-8));
  CHECK(check_structural(c, 512).passes);
  CHECK_THROWS_AS(make_family("tabulated{" + path.string() + "}", 5.0), InvalidArgument);
}

TEST_CASE("family parsing") {
  CHECK(make_family("prototype{2}", 1.0).chi(0.3) == 2.0);
  const CoefficientSet p = make_family(" powerlaw{ 1.5 , 0.5 } ", 1.0);
  CHECK(p.f(4.0) == doctest::Approx(8.0));
  CHECK(p.chi(0.0) == 0.5);
  CHECK_THROWS_AS(make_family("prototype{}", 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_family("prototype{1,2}", 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_family("logistic{1}", 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_family("prototype(1)", 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_family("prototype{-1}", 1.0), InvalidArgument);
}

TEST_CASE("coefficient validation") {
  CoefficientSet bad = prototype(1.0, 1.0);
  bad.f = ScalarFunction::constant(0.1);
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = prototype(1.0, 1.0);
  bad.chi = {[](double s) { return 0.5 - s; }, {}, {}};
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  CHECK_NOTHROW(validate(prototype(1.0, 1.0)));
}
