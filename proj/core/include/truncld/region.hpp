#pragma once

#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "truncld/linalg.hpp"

namespace truncld {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// {x : r_lo < |x| <= r_hi, angle(x, axis) <= half_angle}. half_angle = pi is the
/// whole sphere. This is the only region family the evaluators and estimators accept.
struct RadialCapRegion {
    RadialCapRegion(double r_lo, double r_hi, Vector axis, double half_angle);

    static RadialCapRegion full(int dim, double r_lo, double r_hi = kInf);
    /// In d = 1 any half_angle below pi selects the ray through `axis`.
    static RadialCapRegion cap(const Vector& axis, double half_angle, double r_lo, double r_hi = kInf);

    double r_lo;
    double r_hi;
    Vector axis;
    double half_angle;

    int dim() const noexcept { return static_cast<int>(axis.size()); }
    bool full_sphere() const noexcept { return half_angle >= std::numbers::pi; }

    bool contains(std::span<const double> x) const;
    bool contains(const Vector& x) const { return contains(std::span<const double>(x.data(), x.size())); }
    bool direction_in_cap(std::span<const double> x) const;
};

/// Finite union of pairwise disjoint caps; evaluators sum over members.
using RegionUnion = std::vector<RadialCapRegion>;

bool contains(const RegionUnion& regions, std::span<const double> x);

/// Throws InvalidArgument unless every pair is radially or angularly separated.
void check_disjoint(const RegionUnion& regions);

/// Fraction of the uniform measure on the unit sphere of R^dim lying within
/// half_angle of a fixed axis. In d = 1 this is 1/2 below pi and 1 at pi.
double cap_fraction(int dim, double half_angle);

double angle_between(const Vector& a, const Vector& b);

}  // namespace truncld
