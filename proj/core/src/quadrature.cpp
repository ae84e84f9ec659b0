#include "truncld/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "truncld/error.hpp"

namespace truncld {

namespace {

boost::math::quadrature::tanh_sinh<double>& ts_engine() {
    // The engine grows its abscissa tables lazily, so each thread keeps its own.
    thread_local boost::math::quadrature::tanh_sinh<double> engine(15);
    return engine;
}

}  // namespace

double integrate_ts(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    // Relative tolerance on the underlying routine; the absolute target is checked below.
    const double v = ts_engine().integrate(f, a, b, 1e-13, &err, &l1, &levels);
    if (!std::isfinite(v) || err > std::max(abs_tol, 1e-8 * l1)) {
        std::ostringstream os;
        os.precision(17);
        os << "tanh-sinh quadrature did not converge on [" << a << ", " << b << "]: error estimate " << err;
        throw NumericalError(os.str());
    }
    return v;
}

double integrate_ts_pieces(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breaks, double abs_tol) {
    // Breakpoints come from floating-point sums, so ones that land within a hair
    // of each other or of the ends are the same kink and get merged.
    const double snap = 1e-11 * (1.0 + std::max(std::abs(a), std::abs(b)));
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return !(x > a + snap && x < b - snap); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [&](double x, double y) { return y - x <= snap; }),
                 breaks.end());
    // Slivers narrower than this are where rounding decides which side of a jump a
    // node falls on; a fixed Gauss rule keeps clear of both ends and their mass is negligible.
    const double sliver = 1e-7 * (b - a);
    static const GaussRule g8 = gauss_legendre(8, 0.0, 1.0);
    auto piece = [&](double lo, double hi) {
        if (hi - lo > sliver) {
            try {
                return integrate_ts(f, lo, hi, abs_tol);
            } catch (const NumericalError&) {
                // tanh-sinh probes within rounding distance of the ends, where a kink
                // that is off by an ulp shows up as a jump. Gauss-Kronrod nodes stay clear.
                double err = 0.0;
                double l1 = 0.0;
                const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13,
                                                                                                &err, &l1);
                if (std::isfinite(v) && err <= std::max(abs_tol, 1e-8 * l1)) return v;
                throw;
            }
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < g8.nodes.size(); ++i) acc += g8.weights[i] * f(lo + (hi - lo) * g8.nodes[i]);
        return acc * (hi - lo);
    };
    double lo = a;
    double total = 0.0;
    for (double x : breaks) {
        total += piece(lo, x);
        lo = x;
    }
    return total + piece(lo, b);
}

GaussRule gauss_legendre(int points, double a, double b) {
    if (points < 1) throw_invalid("gauss_legendre needs at least one point");
    GaussRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    // Newton on P_n from the Chebyshev-like initial guess; symmetric pairs.
    for (int i = 0; i < (points + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= points; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[points - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[points - 1 - i] = half * w;
    }
    return rule;
}

}  // namespace truncld
