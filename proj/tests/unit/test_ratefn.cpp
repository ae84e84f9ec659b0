#include <doctest.h>

#include <cmath>

#include <truncld/error.hpp>
#include <truncld/ratefn.hpp>

using namespace truncld;

namespace {
Vector v1(double a) { return Vector::Constant(1, a); }
PowerLawModel sym1(double alpha) { return PowerLawModel(alpha, SpectralMeasure::symmetric_pair(v1(1.0))); }
}  // namespace

TEST_CASE("cases follow alpha") {
    CHECK(RateFunction::for_model(PowerLawModel(0.5, SpectralMeasure::point(v1(1.0)))).rate_case() == RateCase::SubCritical);
    CHECK(RateFunction::for_model(sym1(1.0)).rate_case() == RateCase::Critical);
    CHECK(RateFunction::for_model(sym1(1.5)).rate_case() == RateCase::SuperCritical);
    CHECK_THROWS(RateFunction::for_model(sym1(2.0)));
    CHECK_THROWS_AS(RateFunction::quadratic(Matrix::Constant(1, 1, -1.0)), InvalidArgument);
}

TEST_CASE("subcritical single atom") {
    const auto rf = RateFunction::for_model(PowerLawModel(0.5, SpectralMeasure::point(v1(1.0))));
    CHECK(rf.value(v1(0.0)) == 0.0);
    CHECK(rf.gradient(v1(0.0))(0) == doctest::Approx(2.0).epsilon(1e-10));
    // Lambda(l) = int (e^{l r} - 1) gamma(dr); at l = 1 the series is sum_j alpha/((j - alpha) j!) + e - 1
    double series = std::exp(1.0) - 1.0;
    double fact = 1.0;
    for (int j = 1; j < 30; ++j) {
        fact *= j;
        series += 0.5 / ((j - 0.5) * fact);
    }
    CHECK(rf.value(v1(1.0)) == doctest::Approx(series).epsilon(1e-10));
    const auto neg = legendre(rf, v1(-1.0));
    CHECK(neg.status == ConjugateResult::Status::Diverged);
    CHECK(std::isinf(neg.value));
    const auto at3 = legendre(rf, v1(3.0));
    CHECK(at3.status == ConjugateResult::Status::Converged);
    CHECK(at3.value == doctest::Approx(0.3107252657).epsilon(1e-8));
}

TEST_CASE("critical symmetric is even") {
    const auto rf = RateFunction::for_model(sym1(1.0));
    for (double l : {0.3, 1.7, 4.0}) CHECK(rf.value(v1(l)) == doctest::Approx(rf.value(v1(-l))).epsilon(1e-13));
    CHECK(rf.gradient(v1(0.0)).norm() < 1e-14);
}

TEST_CASE("supercritical drift") {
    // asymmetric zero-mean atoms: weights 1/3 at +2 direction? d = 1 atoms are +-1, so use 2D
    Matrix dirs(2, 3);
    const double s = std::sqrt(3.0) / 2;
    dirs << 1.0, -0.5, -0.5, 0.0, s, -s;
    std::vector<Atom> atoms;
    for (int i = 0; i < 3; ++i) atoms.push_back({dirs.col(i), 1.0 / 3});
    const auto rf = RateFunction::for_model(PowerLawModel(1.5, SpectralMeasure(2, atoms, 0.0)));
    CHECK(rf.gradient(Vector::Zero(2)).norm() < 1e-12);
    Vector l(2);
    l << 0.7, -0.2;
    CHECK(rf.value(l) > 0.0);
}

TEST_CASE("quadratic case") {
    const auto rf = RateFunction::quadratic(Matrix::Constant(1, 1, 2.0));
    CHECK(rf.value(v1(3.0)) == doctest::Approx(9.0));
    const auto c = legendre(rf, v1(1.0));
    CHECK(c.value == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(legendre(rf, v1(2.0)).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("LLN point has zero rate") {
    const auto rf = RateFunction::for_model(PowerLawModel(0.5, SpectralMeasure::point(v1(1.0))));
    const auto c = legendre(rf, rf.gradient(v1(0.0)));
    CHECK(std::abs(c.value) < 1e-12);
    CHECK(c.argmax.norm() < 1e-8);
}

TEST_CASE("isotropic d = 2 and d = 3 against a polar quadrature") {
    // Lambda(l) for alpha < 1 depends only on |l|; compare two directions
    for (int d : {2, 3}) {
        const auto rf = RateFunction::for_model(PowerLawModel(0.6, SpectralMeasure::isotropic(d)));
        Vector a = Vector::Zero(d);
        a(0) = 1.3;
        Vector b = Vector::Constant(d, 1.3 / std::sqrt(static_cast<double>(d)));
        CHECK(rf.value(a) == doctest::Approx(rf.value(b)).epsilon(1e-12));
    }
}

TEST_CASE("d_matrix") {
    CHECK(d_matrix(sym1(1.0))(0, 0) == doctest::Approx(2.0));
    CHECK(d_matrix(sym1(3.0))(0, 0) == doctest::Approx(3.0));
    const Matrix iso = d_matrix(PowerLawModel(1.0, SpectralMeasure::isotropic(2)));
    CHECK((iso - Matrix::Identity(2, 2)).norm() < 1e-14);
    CHECK_THROWS(d_matrix(sym1(2.0)));
}

TEST_CASE("speed_window") {
    const PowerLawModel half(0.5, SpectralMeasure::point(v1(1.0)));
    const auto w = speed_window(half, TruncationSchedule(1.0, 0.5));
    CHECK(w.lo == doctest::Approx(0.875));
    CHECK(w.hi == doctest::Approx(1.25));
    CHECK(check_cn(half, TruncationSchedule(1.0, 0.5), 1.0));
    CHECK_FALSE(check_cn(half, TruncationSchedule(1.0, 0.5), 1.25));

    const auto w25 = speed_window(sym1(2.5), TruncationSchedule(1.0, 0.2));
    CHECK(w25.lo == doctest::Approx(0.5));
    CHECK(w25.hi == doctest::Approx(0.9));

    const auto w4 = speed_window(sym1(4.0), TruncationSchedule(1.0, 0.1));
    CHECK(w4.lo == doctest::Approx(0.5));
    CHECK(w4.hi == doctest::Approx(1.0));
    CHECK(speed_window(sym1(3.0), TruncationSchedule(1.0, 0.2)).right_open_asymptotic);

    CHECK_THROWS(speed_window(sym1(1.0), TruncationSchedule(1.0, 2.0)));
    CHECK_THROWS(speed_window(sym1(2.0), TruncationSchedule(1.0, 0.3)));
}

TEST_CASE("speeds") {
    const auto m = sym1(1.0);
    const TruncationSchedule s(1.0, 0.3);
    const double n = 1000;
    const double mm = std::pow(n, 0.3);
    CHECK(ldp_speed(m, s, n) == doctest::Approx(n / mm));
    CHECK(ldp_scale(m, s, n) == doctest::Approx(n));
    CHECK(md_speed(m, s, 0.8, n) == doctest::Approx(std::pow(n, 1.6) / (n * mm)));
}
