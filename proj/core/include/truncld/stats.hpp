#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace truncld {

inline constexpr double kZ95 = 1.959963984540054;

/// Running sums for a (possibly weighted) Monte Carlo mean. Merging is plain
/// addition, so a fixed merge order gives bit-identical totals.
struct MeanAccumulator {
    std::size_t count = 0;
    std::size_t hits = 0;  // samples with a non-zero contribution
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double y) {
        ++count;
        if (y != 0.0) {
            ++hits;
            sum += y;
            sum_sq += y * y;
        }
    }
    void add_zero() { ++count; }
    void merge(const MeanAccumulator& o) {
        count += o.count;
        hits += o.hits;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

/// Indicator counts for plain Monte Carlo.
struct HitCounter {
    std::size_t count = 0;
    std::size_t hits = 0;

    void merge(const HitCounter& o) {
        count += o.count;
        hits += o.hits;
    }
};

struct EstimateResult {
    double estimate = 0.0;
    double se = 0.0;
    double ci_level = 0.95;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    double ess = 0.0;  // equals samples for plain estimators
    std::string method;

    /// Multiply estimate, se and interval by a positive constant.
    EstimateResult scaled(double factor) const;
};

/// Plain indicator mean; Wilson interval when hits < 50, normal otherwise.
EstimateResult bernoulli_estimate(std::size_t hits, std::size_t samples, std::string method);

/// Importance-sampling mean of weighted indicators; normal interval clipped at 0,
/// ess = (sum y)^2 / sum y^2.
EstimateResult weighted_estimate(const MeanAccumulator& acc, std::string method);

/// Wilson score interval for a binomial proportion.
void wilson_interval(std::size_t hits, std::size_t samples, double z, double& lo, double& hi);

/// |a - b| / sqrt(se_a^2 + se_b^2); infinity if both se vanish and a != b.
double joint_z(const EstimateResult& a, const EstimateResult& b);

/// Least squares fit of y = rate + slope * (1/speed) with y = -log(p)/speed,
/// extrapolating the rate at infinite speed.
struct SlopePoint {
    double n = 0.0;
    double speed = 0.0;
    double p = 0.0;
    double p_se = 0.0;
    double y = 0.0;
};

struct SlopeFit {
    std::vector<SlopePoint> points;
    double rate = 0.0;
    double slope = 0.0;
    double residual = 0.0;  // root mean square of fit residuals
};

/// Requires >= 3 distinct n and every p > 0; throws EstimationFailure otherwise.
SlopeFit fit_slope(std::vector<SlopePoint> points);

}  // namespace truncld
