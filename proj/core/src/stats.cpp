#include "truncld/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "truncld/error.hpp"

namespace truncld {

EstimateResult EstimateResult::scaled(double factor) const {
    EstimateResult r = *this;
    r.estimate *= factor;
    r.se *= factor;
    r.ci_lo *= factor;
    r.ci_hi *= factor;
    return r;
}

void wilson_interval(std::size_t hits, std::size_t samples, double z, double& lo, double& hi) {
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    lo = std::max(0.0, centre - half);
    hi = std::min(1.0, centre + half);
    // Guard against rounding pushing the point estimate outside.
    lo = std::min(lo, p);
    hi = std::max(hi, p);
}

EstimateResult bernoulli_estimate(std::size_t hits, std::size_t samples, std::string method) {
    if (samples == 0) throw EstimationFailure("no samples");
    EstimateResult r;
    r.method = std::move(method);
    r.samples = samples;
    r.hits = hits;
    r.ess = static_cast<double>(samples);
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    r.estimate = p;
    r.se = std::sqrt(p * (1.0 - p) / n);
    if (hits < 50) {
        wilson_interval(hits, samples, kZ95, r.ci_lo, r.ci_hi);
    } else {
        r.ci_lo = std::max(0.0, p - kZ95 * r.se);
        r.ci_hi = p + kZ95 * r.se;
    }
    return r;
}

EstimateResult weighted_estimate(const MeanAccumulator& acc, std::string method) {
    if (acc.count == 0) throw EstimationFailure("no samples");
    EstimateResult r;
    r.method = std::move(method);
    r.samples = acc.count;
    r.hits = acc.hits;
    const double n = static_cast<double>(acc.count);
    const double mean = acc.sum / n;
    const double var = std::max(0.0, acc.sum_sq / n - mean * mean);
    r.estimate = mean;
    r.se = acc.count > 1 ? std::sqrt(var * n / (n - 1.0) / n) : 0.0;
    r.ci_lo = std::max(0.0, mean - kZ95 * r.se);
    r.ci_hi = mean + kZ95 * r.se;
    r.ess = acc.sum_sq > 0.0 ? acc.sum * acc.sum / acc.sum_sq : 0.0;
    return r;
}

double joint_z(const EstimateResult& a, const EstimateResult& b) {
    const double s = std::sqrt(a.se * a.se + b.se * b.se);
    const double d = std::abs(a.estimate - b.estimate);
    if (s == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return d / s;
}

SlopeFit fit_slope(std::vector<SlopePoint> points) {
    std::set<double> ns;
    for (auto& p : points) {
        if (!(p.p > 0.0)) throw EstimationFailure("slope fit needs every probability estimate > 0 (zero hits at some n)");
        if (!(p.speed > 0.0)) throw EstimationFailure("slope fit needs positive speeds");
        p.y = -std::log(p.p) / p.speed;
        ns.insert(p.n);
    }
    if (ns.size() < 3) throw EstimationFailure("slope fit needs at least 3 distinct n");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(points.size());
    for (const auto& p : points) {
        const double x = 1.0 / p.speed;
        sx += x;
        sy += p.y;
        sxx += x * x;
        sxy += x * p.y;
    }
    const double det = m * sxx - sx * sx;
    if (!(det > 0.0)) throw EstimationFailure("slope fit is degenerate (speeds coincide)");
    SlopeFit fit;
    fit.slope = (m * sxy - sx * sy) / det;
    fit.rate = (sy - fit.slope * sx) / m;
    double ss = 0.0;
    for (const auto& p : points) {
        const double e = p.y - fit.rate - fit.slope / p.speed;
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    fit.points = std::move(points);
    return fit;
}

}  // namespace truncld
