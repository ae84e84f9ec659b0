#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <truncld/limits.hpp>
#include <truncld/model.hpp>
#include <truncld/ratefn.hpp>

using namespace truncld;

namespace {

constexpr double pi = std::numbers::pi;
Vector v1(double a) { return Vector::Constant(1, a); }

struct Case {
    const char* name;
    PowerLawModel model;
};

std::vector<Case> rate_cases() {
    Matrix tri(2, 3);
    const double s = std::sqrt(3.0) / 2;
    tri << 1.0, -0.5, -0.5, 0.0, s, -s;
    std::vector<Atom> atoms;
    for (int i = 0; i < 3; ++i) atoms.push_back({tri.col(i), 0.2});
    return {
        {"alpha 0.5 one atom", PowerLawModel(0.5, SpectralMeasure::point(v1(1.0)))},
        {"alpha 0.8 asymmetric", PowerLawModel(0.8, SpectralMeasure(1, {{v1(1.0), 0.7}, {v1(-1.0), 0.3}}, 0.0))},
        {"alpha 1 symmetric", PowerLawModel(1.0, SpectralMeasure::symmetric_pair(v1(1.0)))},
        {"alpha 1.5 symmetric", PowerLawModel(1.5, SpectralMeasure::symmetric_pair(v1(1.0)))},
        {"alpha 1.3 triangle plus isotropic", PowerLawModel(1.3, SpectralMeasure(2, atoms, 0.4))},
        {"alpha 0.7 isotropic 3d", PowerLawModel(0.7, SpectralMeasure::isotropic(3))},
    };
}

Vector random_vec(std::mt19937_64& g, int d, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = u(g);
    return v;
}

}  // namespace

TEST_CASE("Lambda is convex") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> t01(0.05, 0.95);
    for (const auto& c : rate_cases()) {
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        for (int i = 0; i < 50; ++i) {
            const Vector a = random_vec(g, c.model.dim(), 3.0);
            const Vector b = random_vec(g, c.model.dim(), 3.0);
            const double t = t01(g);
            CHECK(rf.value(t * a + (1 - t) * b) <= t * rf.value(a) + (1 - t) * rf.value(b) + 1e-10);
        }
    }
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 g(2);
    for (const auto& c : rate_cases()) {
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        const int d = c.model.dim();
        for (int i = 0; i < 50; ++i) {
            const Vector l = random_vec(g, d, 2.5);
            const Vector grad = rf.gradient(l);
            for (int j = 0; j < d; ++j) {
                const double h = 1e-5 * (1.0 + std::abs(l(j)));
                Vector lp = l, lm = l;
                lp(j) += h;
                lm(j) -= h;
                const double fd = (rf.value(lp) - rf.value(lm)) / (2 * h);
                CHECK(std::abs(fd - grad(j)) <= 1e-6 * std::max(1.0, std::abs(grad(j))));
            }
        }
    }
}

TEST_CASE("Hessian matches differences of the gradient") {
    std::mt19937_64 g(3);
    for (const auto& c : rate_cases()) {
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        const int d = c.model.dim();
        for (int i = 0; i < 10; ++i) {
            const Vector l = random_vec(g, d, 2.0);
            const Matrix hess = rf.hessian(l);
            for (int j = 0; j < d; ++j) {
                const double h = 1e-5;
                Vector lp = l, lm = l;
                lp(j) += h;
                lm(j) -= h;
                const Vector fd = (rf.gradient(lp) - rf.gradient(lm)) / (2 * h);
                CHECK((fd - hess.col(j)).norm() <= 1e-5 * std::max(1.0, hess.norm()));
            }
        }
    }
}

TEST_CASE("Fenchel-Young and duality") {
    std::mt19937_64 g(4);
    for (const auto& c : rate_cases()) {
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        const int d = c.model.dim();
        for (int i = 0; i < 10; ++i) {
            const Vector l0 = random_vec(g, d, 2.0);
            const Vector x = rf.gradient(l0);
            const auto conj = legendre(rf, x);
            CAPTURE(l0.transpose());
            CAPTURE(conj.residual);
            REQUIRE(conj.status == ConjugateResult::Status::Converged);
            CHECK(std::abs(conj.value - (l0.dot(x) - rf.value(l0))) <= 1e-8 * std::max(1.0, std::abs(conj.value)));
            CHECK(conj.value >= -1e-12);
            for (int p = 0; p < 5; ++p) {
                const Vector probe = random_vec(g, d, 3.0);
                CHECK(conj.value >= probe.dot(x) - rf.value(probe) - 1e-9);
            }
        }
    }
}

TEST_CASE("Lambda* is convex along segments") {
    std::mt19937_64 g(5);
    for (const auto& c : rate_cases()) {
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        const int d = c.model.dim();
        for (int i = 0; i < 8; ++i) {
            const Vector a = rf.gradient(random_vec(g, d, 1.5));
            const Vector b = rf.gradient(random_vec(g, d, 1.5));
            const auto fa = legendre(rf, a);
            const auto fb = legendre(rf, b);
            const auto fm = legendre(rf, 0.5 * (a + b));
            REQUIRE(fa.finite());
            REQUIRE(fb.finite());
            REQUIRE(fm.finite());
            CHECK(fm.value <= 0.5 * (fa.value + fb.value) + 1e-8);
        }
    }
}

TEST_CASE("symmetric models have their rate minimum at the origin") {
    for (const auto& c : rate_cases()) {
        if (!c.model.is_symmetric()) continue;
        CAPTURE(std::string(c.name));
        const auto rf = RateFunction::for_model(c.model);
        const Vector zero = Vector::Zero(c.model.dim());
        CHECK(rf.gradient(zero).norm() < 1e-12);
        CHECK(std::abs(legendre(rf, zero).value) < 1e-14);
    }
}

TEST_CASE("speed window is never vacuous") {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> ua(0.1, 5.0);
    std::uniform_real_distribution<double> u01(0.01, 0.99);
    int tried = 0;
    while (tried < 200) {
        const double a = ua(g);
        if (std::abs(a - 2.0) < 1e-3) continue;
        const double rho = u01(g) / a;  // hard: rho < 1/alpha
        const auto model = a == 1.0 || a > 1.0 ? PowerLawModel(a, SpectralMeasure::symmetric_pair(v1(1.0)))
                                               : PowerLawModel(a, SpectralMeasure::point(v1(1.0)));
        const auto w = speed_window(model, TruncationSchedule(1.0, rho));
        CAPTURE(a);
        CAPTURE(rho);
        CHECK(w.non_vacuous());
        CHECK(check_cn(model, TruncationSchedule(1.0, rho), 0.5 * (w.lo + w.hi)));
        ++tried;
    }
}

TEST_CASE("nu(full sphere, (r, inf)) = r^-alpha by quadrature") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> ua(0.1, 3.0);
    std::uniform_real_distribution<double> ur(0.01, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double a = ua(g);
        const double r = ur(g);
        const TailShape s(a, SpectralMeasure::isotropic(2));
        CHECK(std::abs(nu_eval(s, RadialCapRegion::full(2, r), NuMethod::Quadrature) - std::pow(r, -a)) <=
              1e-10 * std::pow(r, -a));
    }
}

TEST_CASE("nu^(k) is monotone and vanishes beyond k") {
    const TailShape s(0.9, SpectralMeasure(1, {{v1(1.0), 0.6}, {v1(-1.0), 0.4}}, 0.0));
    for (int k : {2, 3}) {
        const NuK nk(s, k);
        double prev = 1e300;
        for (double lo = k - 0.95; lo < k; lo += 0.1) {
            const double v = nu_k_eval(nk, RadialCapRegion::full(1, lo)).value;
            CHECK(v <= prev + 1e-10);
            CHECK(v >= 0.0);
            prev = v;
            // a sub-ray cannot carry more mass
            CHECK(nu_k_eval(nk, RadialCapRegion::cap(v1(1.0), pi / 2, lo)).value <= v + 1e-10);
        }
        CHECK(nu_k_eval(nk, RadialCapRegion::full(1, static_cast<double>(k))).value <= 1e-10);
        // mass within (lo, hi] is bounded by the mass beyond lo
        CHECK(nu_k_eval(nk, RadialCapRegion::full(1, k - 0.5, k - 0.25)).value <=
              nu_k_eval(nk, RadialCapRegion::full(1, k - 0.5)).value + 1e-10);
    }
}

TEST_CASE("Gamma_k of the whole sphere is at most one") {
    const StableLimit analytic;
    for (const auto& sig : {SpectralMeasure::symmetric_pair(v1(1.0)), SpectralMeasure::isotropic(2),
                            SpectralMeasure(2, {{Vector::Unit(2, 0), 0.25}, {-Vector::Unit(2, 0), 0.25}}, 0.5)}) {
        const TailShape s(1.2, sig);
        for (int k = 1; k <= 4; ++k) {
            const double g = gamma_k_eval(s, analytic, k, RadialCapRegion::full(s.dim(), 0.0)).value;
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
        }
    }
}

TEST_CASE("prokhorov bound lies in (0, 1]") {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 500; ++i) {
        const double c = std::exp(u(g));
        const double var = std::exp(u(g));
        const double l = std::exp(u(g));
        const double b = prokhorov_bound(10, c, var, l);
        // exp underflows once the exponent passes about 745
        const double expo = l / (2 * c) * std::asinh(c * l / (2 * var));
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        if (expo < 700.0) CHECK(b > 0.0);
    }
}

TEST_CASE("model identities") {
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> ua(0.2, 4.0);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double a = ua(g);
        const PowerLawModel m(a, SpectralMeasure::isotropic(2));
        const double n = 1.0 + std::floor(1e4 * ur(g));
        const double r = std::pow(n, -1.0 / a) * (1.0 + 10.0 * ur(g));
        CHECK(n * tail_prob(a, norming_a(m, n) * r) == doctest::Approx(std::pow(r, -a)).epsilon(1e-12));
        // regimes partition (alpha, rho)
        const double rho = 3.0 * ur(g) + 0.01;
        const auto k = classify_regime(m, TruncationSchedule(1.0, rho)).kind;
        CHECK(((k == RegimeKind::Soft) + (k == RegimeKind::Hard) + (k == RegimeKind::Intermediate)) == 1);
        CHECK((k == RegimeKind::Soft) == (rho * a > 1.0 + 1e-12));
    }
    for (int i = 0; i < 100; ++i) {
        Vector h(3);
        h << ur(g) - 0.5, ur(g) - 0.5, ur(g) + 0.1;
        const double m = 2.0 * ur(g) + 0.05;
        const double l = ur(g);
        const Vector x = truncate(h, m, l);
        if (h.norm() > m) {
            CHECK(x.norm() == doctest::Approx(m + l));
        } else {
            CHECK(truncate(x, m, l) == x);
        }
    }
}

TEST_CASE("nu^(k) quadrature converges across a grid of regions") {
    for (double a : {0.5, 1.0, 1.7}) {
        const TailShape s(a, SpectralMeasure(1, {{v1(1.0), 0.6}, {v1(-1.0), 0.4}}, 0.0));
        for (int k : {2, 3}) {
            const int steps = k == 2 ? 40 : 12;
            for (int i = 1; i < steps; ++i) {
                const double lo = k - 1 + static_cast<double>(i) / steps;
                CAPTURE(a);
                CAPTURE(lo);
                CHECK_NOTHROW(nu_k_eval(NuK(s, k), RadialCapRegion::cap(v1(1.0), pi / 2, lo)));
            }
        }
    }
}
