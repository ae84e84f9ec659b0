#include "truncld/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace truncld {

Sampler::Sampler(const TailShape& shape, LightTailLaw light_tail)
    : dim_(shape.dim()), alpha_(shape.alpha), inv_alpha_(1.0 / shape.alpha), light_(std::move(light_tail)) {
    const auto& sp = shape.spectral;
    const auto atoms = dim_ == 1 ? sp.effective_atoms() : sp.atoms();
    has_iso_ = dim_ > 1 && sp.isotropic_weight() > 0.0;
    double acc = 0.0;
    for (const auto& a : atoms) {
        acc += a.weight;
        cum_.push_back(acc);
        dirs_.push_back(a.direction);
        if (dim_ == 1 && a.direction(0) > 0.0) p_plus_ += a.weight;
    }
}

double Sampler::radius(Stream& rng) const { return std::exp(-std::log(rng.uniform_pos()) * inv_alpha_); }

double Sampler::radius_above(Stream& rng, double t) const { return t * radius(rng); }

void Sampler::direction(Stream& rng, double* out) const {
    if (dim_ == 1) {
        out[0] = rng.uniform() < p_plus_ ? 1.0 : -1.0;
        return;
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it != cum_.end()) {
        const auto& s = dirs_[static_cast<std::size_t>(it - cum_.begin())];
        std::copy(s.data(), s.data() + dim_, out);
        return;
    }
    if (!has_iso_) {
        // u landed past the last atom only through rounding of the cumulative sum.
        const auto& s = dirs_.back();
        std::copy(s.data(), s.data() + dim_, out);
        return;
    }
    double nn = 0.0;
    do {
        nn = 0.0;
        for (int i = 0; i < dim_; ++i) {
            out[i] = rng.normal();
            nn += out[i] * out[i];
        }
    } while (nn == 0.0);
    const double inv = 1.0 / std::sqrt(nn);
    for (int i = 0; i < dim_; ++i) out[i] *= inv;
}

double Sampler::overshoot(Stream& rng) const {
    const auto& v = light_.variant();
    if (auto* e = std::get_if<ExponentialTail>(&v)) return -std::log(rng.uniform_pos()) / e->rate;
    if (auto* u = std::get_if<UniformTail>(&v)) return rng.uniform() * u->upper;
    return 0.0;
}

Vector Sampler::sample_h(Stream& rng) const {
    Vector h(dim_);
    const double r = radius(rng);
    direction(rng, h.data());
    return h * r;
}

void Sampler::sample_x(Stream& rng, double m, double* out) const {
    double r = radius(rng);
    direction(rng, out);
    if (r > m) r = m + overshoot(rng);
    for (int i = 0; i < dim_; ++i) out[i] *= r;
}

void Sampler::sample_x_above(Stream& rng, double m, double t, double* out) const {
    double r = radius_above(rng, t);
    direction(rng, out);
    if (r > m) r = m + overshoot(rng);
    for (int i = 0; i < dim_; ++i) out[i] *= r;
}

void Sampler::add_row(Stream& rng, std::size_t n, double m, double* sum) const {
    if (dim_ == 1) {
        const bool no_overshoot = light_.is_zero();
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // Same draw order as sample_x: radius, direction, overshoot.
            double r = std::exp(-std::log(rng.uniform_pos()) * inv_alpha_);
            const bool plus = rng.uniform() < p_plus_;
            if (r > m) r = no_overshoot ? m : m + overshoot(rng);
            s += plus ? r : -r;
        }
        sum[0] += s;
        return;
    }
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (std::size_t j = 0; j < n; ++j) {
        sample_x(rng, m, x.data());
        for (int i = 0; i < dim_; ++i) sum[i] += x[static_cast<std::size_t>(i)];
    }
}

Sampler::Row Sampler::sample_row(Stream& rng, std::size_t n, double m) const {
    Row row{Matrix(dim_, static_cast<Eigen::Index>(n)), Vector::Zero(dim_)};
    for (std::size_t j = 0; j < n; ++j) {
        auto col = row.x.col(static_cast<Eigen::Index>(j));
        sample_x(rng, m, col.data());
        row.sum += col;
    }
    return row;
}

}  // namespace truncld
