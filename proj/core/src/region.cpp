#include "truncld/region.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "truncld/error.hpp"

namespace truncld {

RadialCapRegion::RadialCapRegion(double lo, double hi, Vector ax, double theta)
    : r_lo(lo), r_hi(hi), axis(std::move(ax)), half_angle(theta) {
    if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw_invalid("region needs 0 <= r_lo < r_hi");
    if (axis.size() < 1) throw_invalid("region axis must be non-empty");
    if (std::abs(axis.norm() - 1.0) > 1e-12) throw_invalid("region axis must be a unit vector");
    if (!(half_angle > 0.0) || half_angle > std::numbers::pi + 1e-15)
        throw_invalid("region half_angle must lie in (0, pi]");
    half_angle = std::min(half_angle, std::numbers::pi);
}

RadialCapRegion RadialCapRegion::full(int dim, double lo, double hi) {
    if (dim < 1) throw_invalid("dimension must be >= 1");
    Vector ax = Vector::Zero(dim);
    ax(0) = 1.0;
    return RadialCapRegion(lo, hi, ax, std::numbers::pi);
}

RadialCapRegion RadialCapRegion::cap(const Vector& ax, double theta, double lo, double hi) {
    return RadialCapRegion(lo, hi, ax, theta);
}

bool RadialCapRegion::direction_in_cap(std::span<const double> x) const {
    if (full_sphere()) return true;
    double dot = 0.0;
    double nn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * axis(static_cast<Eigen::Index>(i));
        nn += x[i] * x[i];
    }
    if (nn == 0.0) return false;
    // angle <= theta  <=>  cos(angle) >= cos(theta)
    return dot / std::sqrt(nn) >= std::cos(half_angle);
}

bool RadialCapRegion::contains(std::span<const double> x) const {
    double nn = 0.0;
    for (double v : x) nn += v * v;
    const double r = std::sqrt(nn);
    if (!(r > r_lo) || r > r_hi) return false;
    return direction_in_cap(x);
}

bool contains(const RegionUnion& regions, std::span<const double> x) {
    return std::any_of(regions.begin(), regions.end(), [&](const RadialCapRegion& r) { return r.contains(x); });
}

double angle_between(const Vector& a, const Vector& b) {
    const double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

void check_disjoint(const RegionUnion& regions) {
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            const auto& a = regions[i];
            const auto& b = regions[j];
            if (a.dim() != b.dim()) throw_invalid("regions in a union must share a dimension");
            const bool radial = a.r_hi <= b.r_lo || b.r_hi <= a.r_lo;
            const bool angular = !a.full_sphere() && !b.full_sphere() &&
                                 angle_between(a.axis, b.axis) > a.half_angle + b.half_angle;
            // d = 1 caps below pi are rays; opposite rays are disjoint.
            const bool opposite_rays = a.dim() == 1 && !a.full_sphere() && !b.full_sphere() &&
                                       a.axis(0) * b.axis(0) < 0.0;
            if (!radial && !angular && !opposite_rays)
                throw_invalid("regions in a union must be pairwise disjoint");
        }
    }
}

double cap_fraction(int dim, double half_angle) {
    if (dim < 1) throw_invalid("dimension must be >= 1");
    const double pi = std::numbers::pi;
    if (half_angle >= pi) return 1.0;
    if (half_angle <= 0.0) return 0.0;
    if (dim == 1) return 0.5;
    if (dim == 2) return half_angle / pi;
    if (dim == 3) return 0.5 * (1.0 - std::cos(half_angle));
    // Polar angle has density proportional to sin^(d-2); the cap integral is a
    // regularised incomplete beta in sin^2.
    const double a = 0.5 * (dim - 1);
    const double s2 = std::pow(std::sin(half_angle), 2);
    const double half = 0.5 * boost::math::ibeta(a, 0.5, s2);
    return half_angle <= pi / 2 ? half : 1.0 - half;
}

}  // namespace truncld
