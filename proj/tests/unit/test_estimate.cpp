#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include <truncld/error.hpp>
#include <truncld/estimate.hpp>

#include "oracles.hpp"

using namespace truncld;

namespace {
constexpr double pi = std::numbers::pi;
Vector v1(double a) { return Vector::Constant(1, a); }
PowerLawModel sym1(double alpha) { return PowerLawModel(alpha, SpectralMeasure::symmetric_pair(v1(1.0))); }
RadialCapRegion ray(double sign, double lo, double hi = kInf) { return RadialCapRegion::cap(v1(sign), pi / 2, lo, hi); }

RunOptions opts(std::uint64_t seed, std::size_t reps) {
    RunOptions o;
    o.seed = seed;
    o.reps = reps;
    o.parallel.workers = 4;
    return o;
}

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}
}  // namespace

TEST_CASE("regime refusals name the violated assumption") {
    const auto m = sym1(1.0);
    CHECK(message_of([&] { est_kth_order(m, TruncationSchedule(1.0, 1.0), 2, ray(1.0, 1.5), 100, opts(1, 10), KthMethod::Plain); }) ==
          "intermediate regime (ρ=1/α) is unsupported: its large deviations are an open problem");
    CHECK(message_of([&] { est_kth_order(m, TruncationSchedule(1.0, 0.5), 2, ray(1.0, 1.5), 100, opts(1, 10), KthMethod::Plain); }) ==
          "soft regime requires lim nP(‖H‖>M_n)=0");
    CHECK(message_of([&] { est_ldp_slope(m, TruncationSchedule(1.0, 2.0), v1(1.0), {10, 20, 40}, opts(1, 10), LdpSampler::Plain); }) ==
          "hard regime requires lim nP(‖H‖>M_n)=∞");
    CHECK_THROWS_AS(est_kth_order(m, TruncationSchedule(1.0, 1.0), 2, ray(1.0, 1.5), 100, opts(1, 10), KthMethod::Plain),
                    AssumptionViolation);
}

TEST_CASE("ratio window guards") {
    const auto m = sym1(1.5);
    const TruncationSchedule s(1.0, 1.0);
    CHECK_THROWS_AS(est_ratio_window(m, s, 0.6, {ray(1.0, 1.0)}, 100, opts(1, 10)), AssumptionViolation);  // below 1/alpha
    CHECK_THROWS_AS(est_ratio_window(m, s, 1.0, {ray(1.0, 1.0)}, 100, opts(1, 10)), AssumptionViolation);  // reaches M_n
    CHECK_THROWS_AS(est_ratio_window(m, s, 0.75, {ray(1.0, 0.5)}, 100, opts(1, 10)), InvalidArgument);
    CHECK(check_lambda_window(m, s, 0.75).empty());
    CHECK_FALSE(check_lambda_window(sym1(3.0), TruncationSchedule(1.0, 0.8), 0.5).empty());
}

TEST_CASE("ratio window: opposite rays agree for a symmetric model") {
    const auto m = sym1(1.5);
    const TruncationSchedule s(1.0, 1.0);
    const auto pos = est_ratio_window(m, s, 0.75, {ray(1.0, 1.0)}, 200, opts(3, 40'000));
    const auto neg = est_ratio_window(m, s, 0.75, {ray(-1.0, 1.0)}, 200, opts(4, 40'000));
    CHECK(pos.limit == doctest::Approx(0.5));
    CHECK(joint_z(pos.estimate, neg.estimate) < 4.0);
}

TEST_CASE("k-th order limits") {
    const auto m = sym1(1.0);
    const TruncationSchedule s(1.0, 1.25);
    const auto r = est_kth_order(m, s, 2, RadialCapRegion::full(1, 1.5), 100, opts(5, 10), KthMethod::Plain);
    CHECK(r.limit == doctest::Approx(0.25 * oracle::nu2_single_atom(1.0, 1.5)).epsilon(1e-9));
    CHECK(r.limit == doctest::Approx(0.8207).epsilon(1e-4));
    // k = 1 reduces to nu: r^-alpha sigma(cap)
    const auto k1 = est_kth_order(m, s, 1, ray(1.0, 0.6), 100, opts(5, 10), KthMethod::Plain);
    CHECK(k1.limit == doctest::Approx(0.5 / 0.6));
    CHECK_THROWS_AS(est_kth_order(m, s, 2, RadialCapRegion::full(1, 0.9), 100, opts(5, 10), KthMethod::Plain),
                    InvalidArgument);
}

TEST_CASE("KTagged matches Plain on a feasible instance") {
    const auto m = sym1(1.0);
    const TruncationSchedule s(1.0, 1.25);
    const auto reg = RadialCapRegion::full(1, 1.5);
    const auto plain = est_kth_order(m, s, 2, reg, 100, opts(6, 60'000), KthMethod::Plain);
    const auto tagged = est_kth_order(m, s, 2, reg, 100, opts(7, 60'000), KthMethod::KTagged);
    CHECK(plain.estimate.hits >= 100);
    CHECK(joint_z(plain.estimate, tagged.estimate) < 4.0);
    CHECK_FALSE(tagged.warnings.empty());  // nP = 100^-0.25 > 0.3
}

TEST_CASE("boundary references") {
    const auto m = sym1(1.5);
    const TruncationSchedule s(1.0, 1.2);
    CHECK(est_boundary(m, s, 1, ray(1.0, 0.0), 50, opts(1, 100)).limit == doctest::Approx(0.25));
    CHECK(est_boundary(m, s, 1, RadialCapRegion::full(1, 0.0), 50, opts(1, 100)).limit == doctest::Approx(0.5));
    const PowerLawModel iso(1.5, SpectralMeasure::isotropic(2));
    const auto k2 = est_boundary(iso, TruncationSchedule(1.0, 1.0), 2, RadialCapRegion::full(2, 0.0), 50, opts(2, 2000));
    CHECK(k2.limit == 0.0);
    CHECK_FALSE(k2.warnings.empty());
}

TEST_CASE("ldp slope at the LLN point") {
    const PowerLawModel m(0.5, SpectralMeasure::point(v1(1.0)));
    // c = 1 puts x = 2 at the largest reachable sum for n = 16, so use a roomier schedule
    const TruncationSchedule s(25.0, 0.5);
    const auto r = est_ldp_slope(m, s, v1(2.0), {16, 81, 256, 625}, opts(8, 4000), LdpSampler::Plain);
    CAPTURE(r.failure);
    REQUIRE(r.failure.empty());
    CHECK(r.reference_rate == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(r.fit.rate) < 0.05);
}

TEST_CASE("tilted and plain agree where plain sees the event") {
    const PowerLawModel m(0.5, SpectralMeasure::point(v1(1.0)));
    const TruncationSchedule s(1.0, 0.5);
    const std::vector<std::size_t> grid{64, 128, 256};
    const auto plain = est_ldp_slope(m, s, v1(2.4), grid, opts(9, 40'000), LdpSampler::Plain);
    const auto tilted = est_ldp_slope(m, s, v1(2.4), grid, opts(10, 40'000), LdpSampler::Tilted);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = plain.ladder[i].estimate;
        const auto& t = tilted.ladder[i].estimate;
        if (p.hits < 100) continue;
        CHECK(joint_z(p, t) < 4.0);
    }
    CHECK_THROWS_AS(est_ldp_slope(m, TruncationSchedule(1.0, 0.5, LightTailLaw::exponential(1.0)), v1(2.4), grid, opts(1, 10),
                                  LdpSampler::Tilted),
                    InvalidArgument);
}

TEST_CASE("ldp slope refuses alpha = 2") {
    CHECK_THROWS_AS(est_ldp_slope(sym1(2.0), TruncationSchedule(1.0, 0.3), v1(1.0), {10, 20, 40}, opts(1, 10), LdpSampler::Plain),
                    AssumptionViolation);
}

TEST_CASE("moderate deviations") {
    const auto m = sym1(1.0);
    const TruncationSchedule s(1.0, 0.3);
    const std::vector<std::size_t> grid{100, 300, 1000};
    const auto r1 = est_moderate(m, s, 0.825, v1(1.0), grid, opts(11, 10));
    CHECK(r1.reference_rate == doctest::Approx(0.25).epsilon(1e-10));
    const auto r2 = est_moderate(m, s, 0.825, v1(2.0), grid, opts(11, 10));
    CHECK(r2.reference_rate == doctest::Approx(4.0 * r1.reference_rate).epsilon(1e-10));
    const auto zero = est_moderate(m, s, 0.825, v1(0.0), {1000}, opts(12, 20'000));
    // -log p / beta at x = 0 is log 2 / beta; p itself sits near 1/2
    const double beta = md_speed(m, s, 0.825, 1000);
    const double p = std::exp(-zero.ladder[0].estimate.estimate * beta);
    CHECK(std::abs(p - 0.5) < 0.02);
    CHECK_THROWS_AS(est_moderate(m, s, 0.5, v1(1.0), grid, opts(1, 10)), AssumptionViolation);
}

TEST_CASE("n = 1 closed form") {
    const auto m = sym1(1.5);
    const TruncationSchedule s(3.0, 1.0, LightTailLaw::exponential(1.0));
    for (const auto& reg : {ray(1.0, 2.0), RadialCapRegion::full(1, 2.5, 3.5), RadialCapRegion::full(1, 1.5, 2.5)}) {
        const double exact = single_summand_prob(m, s, reg);
        const auto e = est_probability(m, s, reg, 1, opts(13, 200'000));
        CHECK(std::abs(e.estimate - exact) < 4.0 * e.se);
    }
}
