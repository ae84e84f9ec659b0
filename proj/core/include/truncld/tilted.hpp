#pragma once

#include <vector>

#include "truncld/model.hpp"
#include "truncld/rng.hpp"

namespace truncld {

/// Exponentially tilted law of one truncated summand in d = 1 with atom-only
/// sigma and L = 0: P_theta(dx) = e^(theta x) P(X in dx) / Z(theta), where
/// X = s min(R, M). Radii are drawn by numerical inversion of the tilted
/// radial CDF (continuous part on [1, M) plus an atom at M).
class TiltedSummand {
public:
    TiltedSummand(const TailShape& shape, double m, double theta);

    /// log Z(theta) = log E e^(theta X).
    double log_mgf() const noexcept { return log_z_; }
    /// E_theta X.
    double mean() const;
    double draw(Stream& rng) const;

    /// Tilted CDF of R given direction index i, for tests.
    double radial_cdf(std::size_t i, double r) const;
    std::size_t directions() const noexcept { return dirs_.size(); }
    double direction_sign(std::size_t i) const { return dirs_[i].sign; }

private:
    struct Direction {
        double sign;
        double prob;      // tilted direction probability
        double z;         // int e^(theta s r) P(R in dr) incl. the atom at M
        double atom;      // e^(theta s M) M^-alpha
        std::vector<double> cum;  // continuous mass up to each grid point
    };

    double density(double s, double r) const;
    double cell_mass(double s, double a, double b) const;
    double cell_moment(double s, double a, double b) const;
    double invert(const Direction& d, double target) const;

    double alpha_;
    double m_;
    double theta_;
    double log_z_ = 0.0;
    std::vector<double> grid_;
    std::vector<Direction> dirs_;
};

/// Per-summand tilt whose tilted mean equals `target` (|target| < M), found by
/// bisection on theta. Centres the sampler on the event boundary at finite n.
double saddlepoint_tilt(const TailShape& shape, double m, double target);

}  // namespace truncld
