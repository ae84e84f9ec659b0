#include "truncld/tilted.hpp"

#include <algorithm>
#include <cmath>

#include "truncld/error.hpp"
#include "truncld/quadrature.hpp"

namespace truncld {

namespace {

constexpr int kCells = 512;
constexpr int kGauss = 16;

const GaussRule& unit_rule() {
    static const GaussRule rule = gauss_legendre(kGauss, 0.0, 1.0);
    return rule;
}

}  // namespace

TiltedSummand::TiltedSummand(const TailShape& shape, double m, double theta)
    : alpha_(shape.alpha), m_(m), theta_(theta) {
    if (shape.dim() != 1) throw_invalid("tilted sampler supports d = 1 only");
    if (shape.spectral.isotropic_weight() > 0.0) throw_invalid("tilted sampler needs an atom-only spectral measure");
    if (!(m > 0.0)) throw_invalid("tilted sampler needs M > 0");

    if (m_ > 1.0) {
        grid_.resize(kCells + 1);
        const double lm = std::log(m_);
        for (int i = 0; i <= kCells; ++i) grid_[i] = std::exp(lm * i / kCells);
        grid_.back() = m_;
    }
    double z = 0.0;
    for (double s : {1.0, -1.0}) {
        double w = 0.0;
        for (const auto& a : shape.spectral.atoms())
            if (a.direction(0) * s > 0.0) w += a.weight;
        if (w == 0.0) continue;
        Direction d{s, w, 0.0, 0.0, {}};
        if (m_ > 1.0) {
            d.cum.resize(grid_.size());
            d.cum[0] = 0.0;
            for (std::size_t i = 1; i < grid_.size(); ++i) d.cum[i] = d.cum[i - 1] + cell_mass(s, grid_[i - 1], grid_[i]);
            // P(R > M) = M^-alpha; every such draw sits at M.
            d.atom = std::exp(theta_ * s * m_) * std::pow(m_, -alpha_);
            d.z = d.cum.back() + d.atom;
        } else {
            d.atom = std::exp(theta_ * s * m_);
            d.z = d.atom;
        }
        z += w * d.z;
        dirs_.push_back(std::move(d));
    }
    for (auto& d : dirs_) d.prob = d.prob * d.z / z;
    log_z_ = std::log(z);
}

double TiltedSummand::density(double s, double r) const {
    return std::exp(theta_ * s * r) * alpha_ * std::pow(r, -alpha_ - 1.0);
}

double TiltedSummand::cell_mass(double s, double a, double b) const {
    const auto& g = unit_rule();
    double acc = 0.0;
    for (int i = 0; i < kGauss; ++i) acc += g.weights[i] * density(s, a + (b - a) * g.nodes[i]);
    return acc * (b - a);
}

double TiltedSummand::cell_moment(double s, double a, double b) const {
    const auto& g = unit_rule();
    double acc = 0.0;
    for (int i = 0; i < kGauss; ++i) {
        const double r = a + (b - a) * g.nodes[i];
        acc += g.weights[i] * r * density(s, r);
    }
    return acc * (b - a);
}

double TiltedSummand::mean() const {
    double mu = 0.0;
    for (const auto& d : dirs_) {
        double first = d.atom * m_;
        for (std::size_t i = 1; i < grid_.size(); ++i) first += cell_moment(d.sign, grid_[i - 1], grid_[i]);
        mu += d.prob * d.sign * first / d.z;
    }
    return mu;
}

double saddlepoint_tilt(const TailShape& shape, double m, double target) {
    if (!(std::abs(target) < m)) throw_invalid("saddlepoint tilt needs |target| < M");
    // The tilted mean is increasing in theta; theta of order 1/M moves it by O(M).
    double lo = 0.0;
    double hi = 0.0;
    const bool up = TiltedSummand(shape, m, 0.0).mean() < target;
    double step = (up ? 1.0 : -1.0) / m;
    for (int i = 0; i < 200; ++i) {
        hi = step;
        const double mu = TiltedSummand(shape, m, hi).mean();
        if (up ? mu >= target : mu <= target) break;
        lo = hi;
        step *= 2.0;
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double mu = TiltedSummand(shape, m, mid).mean();
        if (up ? mu < target : mu > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (std::abs(hi - lo) <= 1e-10 * std::abs(hi)) break;
    }
    return 0.5 * (lo + hi);
}

double TiltedSummand::radial_cdf(std::size_t i, double r) const {
    const auto& d = dirs_.at(i);
    if (r >= m_) return 1.0;
    if (m_ <= 1.0 || r <= 1.0) return 0.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    const std::size_t c = static_cast<std::size_t>(it - grid_.begin()) - 1;
    return (d.cum[c] + cell_mass(d.sign, grid_[c], r)) / d.z;
}

double TiltedSummand::invert(const Direction& d, double target) const {
    const auto it = std::upper_bound(d.cum.begin(), d.cum.end(), target);
    const std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(it - d.cum.begin()) - 1, grid_.size() - 2);
    double lo = grid_[c];
    double hi = grid_[c + 1];
    const double base = d.cum[c];
    const double need = target - base;
    double r = 0.5 * (lo + hi);
    // Newton safeguarded by the bracketing cell.
    for (int it2 = 0; it2 < 100; ++it2) {
        const double f = cell_mass(d.sign, grid_[c], r) - need;
        if (f > 0.0) {
            hi = r;
        } else {
            lo = r;
        }
        double next = r - f / density(d.sign, r);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-12 * r || hi - lo <= 1e-12 * r) return next;
        r = next;
    }
    return r;
}

double TiltedSummand::draw(Stream& rng) const {
    double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < dirs_.size() && u >= dirs_[i].prob) {
        u -= dirs_[i].prob;
        ++i;
    }
    const auto& d = dirs_[i];
    const double t = rng.uniform() * d.z;
    if (m_ <= 1.0 || t >= d.cum.back()) return d.sign * m_;
    return d.sign * invert(d, t);
}

}  // namespace truncld
