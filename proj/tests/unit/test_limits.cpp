#include <doctest.h>

#include <cmath>
#include <numbers>

#include <truncld/error.hpp>
#include <truncld/limits.hpp>

#include "oracles.hpp"

using namespace truncld;

namespace {
constexpr double pi = std::numbers::pi;
Vector v1(double a) { return Vector::Constant(1, a); }
TailShape sym1(double alpha) { return TailShape(alpha, SpectralMeasure::symmetric_pair(v1(1.0))); }
TailShape plus1(double alpha) { return TailShape(alpha, SpectralMeasure::point(v1(1.0))); }
RadialCapRegion ray(double sign, double lo, double hi = kInf) { return RadialCapRegion::cap(v1(sign), pi / 2, lo, hi); }
}  // namespace

TEST_CASE("mu_ratio") {
    CHECK(mu_ratio(sym1(1.5), RadialCapRegion::full(1, 2.0)) == doctest::Approx(0.35355339059327373).epsilon(1e-14));
    for (double a : {0.3, 1.0, 2.5}) CHECK(mu_ratio(sym1(a), RadialCapRegion::full(1, 1.0)) == doctest::Approx(1.0));
    CHECK(mu_ratio(sym1(1.0), ray(1.0, 1.0)) == doctest::Approx(0.5));
    const TailShape iso(1.2, SpectralMeasure::isotropic(3));
    CHECK(mu_ratio(iso, RadialCapRegion::cap(Vector::Unit(3, 2), pi / 3, 2.0, 4.0)) ==
          doctest::Approx(0.25 * (std::pow(2.0, -1.2) - std::pow(4.0, -1.2))));
    CHECK(mu_ratio(sym1(1.0), RegionUnion{ray(1.0, 2.0), ray(-1.0, 4.0)}) == doctest::Approx(0.25 + 0.125));
}

TEST_CASE("nu_eval") {
    CHECK(nu_eval(sym1(1.0), RadialCapRegion::full(1, 0.5)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(nu_eval(sym1(0.7), RadialCapRegion::full(1, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu_eval(sym1(0.5), RadialCapRegion::full(1, 0.25, 0.5)) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(nu_eval(sym1(0.5), RadialCapRegion::full(1, 1.5)) == 0.0);
    for (double a : {0.4, 1.0, 1.7})
        for (double r : {0.1, 0.5, 0.99, 1.0}) {
            const auto reg = RadialCapRegion::full(1, r);
            CHECK(std::abs(nu_eval(sym1(a), reg, NuMethod::Quadrature) - std::pow(r, -a)) < 1e-10);
        }
}

TEST_CASE("nu^(2) single atom against the nested quadrature oracle") {
    const double closed = oracle::nu2_single_atom_alpha1_c15();
    const double nested = oracle::nu2_single_atom(1.0, 1.5);
    CHECK(nested == doctest::Approx(closed).epsilon(1e-10));
    CHECK(closed == doctest::Approx(3.2828).epsilon(1e-4));

    const NuK exact(plus1(1.0), 2);
    CHECK(std::abs(nu_k_eval(exact, ray(1.0, 1.5)).value - nested) < 1e-6);
    for (double a : {0.5, 1.3})
        for (double c : {1.2, 1.8}) CHECK(std::abs(nu_k_eval(NuK(plus1(a), 2), ray(1.0, c)).value - oracle::nu2_single_atom(a, c)) < 1e-8);
}

TEST_CASE("nu^(2) symmetric and mixed-sign pairs") {
    const NuK exact(sym1(1.0), 2);
    const double both = nu_k_eval(exact, RadialCapRegion::full(1, 1.5)).value;
    CHECK(both == doctest::Approx(1.6414).epsilon(1e-4));
    CHECK(both == doctest::Approx(0.5 * oracle::nu2_single_atom(1.0, 1.5)).epsilon(1e-9));
    CHECK(nu_k_eval(exact, ray(1.0, 1.5)).value == doctest::Approx(both / 2).epsilon(1e-12));
}

TEST_CASE("nu^(k) edge cases") {
    const NuK n1(sym1(0.8), 1);
    CHECK(nu_k_eval(n1, RadialCapRegion::full(1, 0.4)).value == doctest::Approx(nu_eval(sym1(0.8), RadialCapRegion::full(1, 0.4))));
    CHECK_THROWS_AS(nu_k_eval(NuK(sym1(1.0), 2), RadialCapRegion::full(1, 1.0)), InvalidArgument);
    CHECK(nu_k_eval(NuK(sym1(1.0), 2), RadialCapRegion::full(1, 2.0)).value == 0.0);
    // the atom of nu^(2) at |x| = 2 sits on the boundary
    CHECK_THROWS_AS(nu_k_eval(NuK(sym1(1.0), 2), RadialCapRegion::full(1, 1.5, 2.0)), InvalidArgument);
    CHECK_THROWS_AS(nu_k_eval(NuK(TailShape(1.0, SpectralMeasure::isotropic(2)), 2), RadialCapRegion::full(2, 1.5)),
                    InvalidArgument);
}

TEST_CASE("nu^(k) Monte Carlo agrees with quadrature") {
    for (int k : {2, 3}) {
        for (double lo : {k - 0.7, k - 0.3}) {
            const auto reg = RadialCapRegion::full(1, lo);
            const double exact = nu_k_eval(NuK(sym1(1.2), k), reg).value;
            NuK mc(sym1(1.2), k, NuKMethod::WeightedMonteCarlo);
            mc.samples = 400'000;
            mc.seed = 17 + k;
            const auto e = nu_k_eval(mc, reg);
            REQUIRE(e.std_error.has_value());
            CHECK(std::abs(e.value - exact) < 4.0 * *e.std_error);
        }
    }
}

TEST_CASE("nu^(k) in higher dimension by Monte Carlo") {
    // two copies of the e1 atom: the cap around e1 holds all of nu^(2) beyond 1.5
    const TailShape s(1.0, SpectralMeasure(2, {{Vector::Unit(2, 0), 0.5}, {Vector::Unit(2, 1), 0.5}}, 0.0));
    NuK mc(s, 2, NuKMethod::WeightedMonteCarlo);
    mc.samples = 400'000;
    const auto e = nu_k_eval(mc, RadialCapRegion::cap(Vector::Unit(2, 0), 0.1, 1.5));
    CHECK(std::abs(e.value - 0.25 * oracle::nu2_single_atom(1.0, 1.5)) < 4.0 * *e.std_error);
}

TEST_CASE("gamma_k_eval") {
    const StableLimit analytic;
    CHECK(gamma_k_eval(sym1(1.5), analytic, 1, ray(1.0, 0.0)).value == doctest::Approx(0.25));
    CHECK(gamma_k_eval(sym1(1.5), analytic, 2, ray(1.0, 0.0)).value == doctest::Approx(1.0 / 16));
    CHECK(gamma_k_eval(sym1(1.5), analytic, 1, RadialCapRegion::full(1, 0.0)).value == doctest::Approx(0.5));
    const TailShape iso(1.0, SpectralMeasure::isotropic(2));
    CHECK(gamma_k_eval(iso, analytic, 2, RadialCapRegion::full(2, 0.0)).value == 0.0);
    CHECK_THROWS_AS(gamma_k_eval(plus1(0.5), analytic, 1, ray(1.0, 0.0)), InvalidArgument);

    StableLimit mc;
    mc.mode = StableMode::MonteCarlo;
    mc.samples = 20'000;
    mc.n_approx = 200;
    const auto e = gamma_k_eval(sym1(1.5), mc, 1, ray(1.0, 0.0));
    REQUIRE(e.std_error.has_value());
    CHECK(std::abs(e.value - 0.25) < 4.0 * *e.std_error + 1e-3);
    // one-sided alpha < 1 law: every partial sum is positive
    CHECK(gamma_k_eval(plus1(0.5), mc, 1, ray(1.0, 0.0)).value == doctest::Approx(1.0));
}

TEST_CASE("prokhorov_bound") {
    CHECK(prokhorov_bound(10, 1.0, 1.0, 2.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK(prokhorov_bound(10, 1.0, 1.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    double prev = 1.0;
    for (double l = 0.1; l < 50.0; l *= 1.5) {
        const double b = prokhorov_bound(5, 2.0, 3.0, l);
        CHECK(b > 0.0);
        CHECK(b <= prev);
        prev = b;
    }
    CHECK_THROWS_AS(prokhorov_bound(5, 0.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("single-summand truncation limit") {
    const TailShape s = sym1(1.0);
    for (double t : {2.0, 10.0, 1e4}) {
        const auto c = xt_limit_check(s, LightTailLaw::zero(), t, RadialCapRegion::full(1, 0.5, 0.9));
        CHECK(c.finite_t == doctest::Approx(2.0 - 1.0 / 0.9).epsilon(1e-12));
        CHECK(c.limit == doctest::Approx(2.0 - 1.0 / 0.9).epsilon(1e-12));
    }
    const auto open = xt_limit_check(s, LightTailLaw::zero(), 5.0, RadialCapRegion::full(1, 0.5));
    CHECK(open.finite_t == doctest::Approx(2.0));
    CHECK(open.limit == doctest::Approx(2.0));
    const auto beyond = xt_limit_check(s, LightTailLaw::uniform(1.0), 4.0, RadialCapRegion::full(1, 0.5, 0.9));
    CHECK(beyond.finite_t == doctest::Approx(2.0 - 1.0 / 0.9));
    const auto mc = xt_limit_check(s, LightTailLaw::exponential(1.0), 8.0, RadialCapRegion::full(1, 0.5), 200'000, 5);
    REQUIRE(mc.empirical.has_value());
    CHECK(std::abs(mc.empirical->estimate - mc.finite_t) < 4.0 * mc.empirical->se);
}
