#pragma once

#include <span>
#include <vector>

#include "truncld/linalg.hpp"
#include "truncld/model.hpp"
#include "truncld/rng.hpp"

namespace truncld {

/// Draws H = R * Theta and truncated summands X. Immutable after construction;
/// all randomness comes from the Stream passed in, so one Sampler can be shared.
class Sampler {
public:
    explicit Sampler(const TailShape& shape, LightTailLaw light_tail = {});

    int dim() const noexcept { return dim_; }
    double alpha() const noexcept { return alpha_; }

    /// Pareto radius R = U^(-1/alpha).
    double radius(Stream& rng) const;
    /// Pareto radius conditioned on R > t (t >= 1): t * U^(-1/alpha).
    double radius_above(Stream& rng, double t) const;
    /// Unit direction from sigma; writes dim() values.
    void direction(Stream& rng, double* out) const;
    double overshoot(Stream& rng) const;

    Vector sample_h(Stream& rng) const;

    /// One truncated summand at threshold m, written into out.
    void sample_x(Stream& rng, double m, double* out) const;
    /// Truncated summand conditioned on |H| > t.
    void sample_x_above(Stream& rng, double m, double t, double* out) const;

    /// Adds n truncated summands to sum (dim() entries).
    void add_row(Stream& rng, std::size_t n, double m, double* sum) const;

    struct Row {
        Matrix x;  // dim x n
        Vector sum;
    };
    Row sample_row(Stream& rng, std::size_t n, double m) const;

private:
    int dim_;
    double alpha_;
    double inv_alpha_;
    LightTailLaw light_;
    // Cumulative categorical table over atoms, with the isotropic part last.
    std::vector<double> cum_;
    std::vector<Vector> dirs_;
    bool has_iso_;
    // d = 1 fast path: probability of the + direction.
    double p_plus_ = 0.0;
};

}  // namespace truncld
