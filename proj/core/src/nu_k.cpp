#include <functional>
#include <cmath>
#include <numbers>

#include "truncld/error.hpp"
#include "truncld/limits.hpp"
#include "truncld/quadrature.hpp"
#include "truncld/sampler.hpp"

namespace truncld {

namespace {

struct Interval {
    double lo;  // open
    double hi;  // closed
};

// nu^(k) in d = 1: points s_j r_j with s_j = +-1 of mass w_plus / w_minus and
// r_j ~ gamma restricted to (eta, 1]. Everything below eta contributes nothing,
// because then |sum| <= eta + (k - 1) = r_lo.
class Line1D {
public:
    Line1D(const TailShape& shape, int k, const RadialCapRegion& region, double tol)
        : alpha_(shape.alpha), k_(k), tol_(tol), eta_(region.r_lo - (k - 1)) {
        for (const auto& a : shape.spectral.effective_atoms()) (a.direction(0) > 0 ? w_plus_ : w_minus_) += a.weight;
        const bool full = region.full_sphere();
        if (full || region.axis(0) > 0) targets_.push_back({region.r_lo, region.r_hi});
        if (full || region.axis(0) < 0) targets_.push_back({-region.r_hi, -region.r_lo});
        for (const auto& iv : targets_) {
            if (std::isfinite(iv.lo)) bounds_.push_back(iv.lo);
            if (std::isfinite(iv.hi)) bounds_.push_back(iv.hi);
        }
    }

    double value() const { return eval(0, 0.0); }

private:
    bool in_target(double y) const {
        for (const auto& iv : targets_)
            if (y > iv.lo && y <= iv.hi) return true;
        return false;
    }

    double gamma_mass(double a, double b) const {
        a = std::max(a, eta_);
        b = std::min(b, 1.0);
        if (!(b > a)) return 0.0;
        return std::pow(a, -alpha_) - std::pow(b, -alpha_);
    }

    // gamma-mass of {r in (eta, 1] : c + s r in targets}.
    double last_level(double c, double s) const {
        double m = 0.0;
        for (const auto& iv : targets_) {
            double a = (iv.lo - c) / s;
            double b = (iv.hi - c) / s;
            if (a > b) std::swap(a, b);
            m += gamma_mass(a, b);
        }
        return m;
    }

    // Offsets that the remaining levels can add at a kink or jump of the inner function.
    std::vector<double> offsets(int levels) const {
        std::vector<double> out{0.0};
        const double steps[] = {-1.0, -eta_, 0.0, eta_, 1.0};
        for (int l = 0; l < levels; ++l) {
            std::vector<double> next;
            for (double o : out)
                for (double st : steps) next.push_back(o + st);
            out.swap(next);
        }
        return out;
    }

    double eval(int level, double c) const {
        const int remaining = k_ - level;
        if (remaining == 0) return in_target(c) ? 1.0 : 0.0;
        double total = 0.0;
        for (double s : {1.0, -1.0}) {
            const double w = s > 0 ? w_plus_ : w_minus_;
            if (w == 0.0) continue;
            double term = eval(level + 1, c + s);  // radial atom at r = 1
            if (remaining == 1) {
                term += last_level(c, s);
            } else {
                std::vector<double> breaks;
                for (double b : bounds_)
                    for (double t : offsets(remaining - 1)) breaks.push_back(s * (b - c - t));
                const double a = alpha_;
                term += integrate_ts_pieces(
                    [&, s, a](double r) { return a * std::pow(r, -a - 1.0) * eval(level + 1, c + s * r); }, eta_, 1.0,
                    std::move(breaks), tol_);
            }
            total += w * term;
        }
        return total;
    }

    double alpha_;
    int k_;
    double tol_;
    double eta_;
    double w_plus_ = 0.0;
    double w_minus_ = 0.0;
    std::vector<Interval> targets_;
    std::vector<double> bounds_;
};

void enumerate_sums(const std::vector<Atom>& atoms, int k, Vector& acc, const std::function<void(const Vector&)>& fn) {
    if (k == 0) {
        fn(acc);
        return;
    }
    for (const auto& a : atoms) {
        acc += a.direction;
        enumerate_sums(atoms, k - 1, acc, fn);
        acc -= a.direction;
    }
}

}  // namespace

NuK::NuK(TailShape s, int kk, NuKMethod m) : shape(std::move(s)), k(kk), method(m) {
    if (k < 1) throw_invalid("nu^(k) needs k >= 1");
}

void check_nu_k_continuity(const TailShape& shape, int k, const RadialCapRegion& region) {
    const double tol = 1e-12;
    auto on_radius = [&](double r) {
        return std::abs(r - region.r_lo) <= tol || (std::isfinite(region.r_hi) && std::abs(r - region.r_hi) <= tol);
    };
    const int d = shape.dim();
    if (k == 1 && d > 1 && shape.spectral.isotropic_weight() > 0.0 && on_radius(1.0))
        throw_invalid("region boundary radius 1 carries an atom of nu (not a continuity set)");

    std::vector<Atom> atoms;
    for (const auto& a : shape.spectral.effective_atoms())
        if (a.weight > 0.0) atoms.push_back(a);
    Vector acc = Vector::Zero(d);
    enumerate_sums(atoms, k, acc, [&](const Vector& v) {
        const double r = v.norm();
        const std::span<const double> vs(v.data(), static_cast<std::size_t>(d));
        if (on_radius(r) && r > 0.0 && region.direction_in_cap(vs))
            throw_invalid("region boundary radius carries an atom of nu^(k) (not a continuity set)");
        if (!region.full_sphere() && r > region.r_lo - tol && r <= region.r_hi + tol && r > 0.0 && d > 1) {
            const double ang = angle_between(v, region.axis);
            if (std::abs(ang - region.half_angle) <= tol)
                throw_invalid("region cap boundary carries an atom of nu^(k) (not a continuity set)");
        }
    });
}

Evaluation nu_k_eval(const NuK& nuk, const RadialCapRegion& region) {
    const int k = nuk.k;
    if (region.dim() != nuk.shape.dim()) throw_invalid("region dimension does not match the model");
    if (!(region.r_lo > k - 1)) throw_invalid("nu^(k) needs r_lo > k-1; the measure may be infinite there");
    const char* tag = nuk.method == NuKMethod::ExactQuadrature ? "exact_quadrature" : "weighted_monte_carlo";
    if (region.r_lo >= k) return {0.0, nuk.method == NuKMethod::WeightedMonteCarlo ? std::optional<double>(0.0) : std::nullopt, tag};
    check_nu_k_continuity(nuk.shape, k, region);

    const double eta = region.r_lo - (k - 1);
    if (nuk.method == NuKMethod::ExactQuadrature) {
        if (k == 1) return {nu_eval(nuk.shape, region), std::nullopt, tag};
        if (nuk.shape.dim() != 1 || k > 3)
            throw_invalid("exact quadrature for nu^(k) covers d = 1 and k <= 3; use weighted_monte_carlo");
        return {Line1D(nuk.shape, k, region, nuk.tolerance).value(), std::nullopt, tag};
    }

    // Each point from nu restricted to B_eta^c, normalised by its mass eta^-alpha.
    const double a = nuk.shape.alpha;
    const double mass = std::pow(eta, -a);
    const double p_atom = 1.0 / mass;
    const Sampler sampler(nuk.shape);
    const int d = nuk.shape.dim();
    auto hits = run_chunked<HitCounter>(nuk.seed, nuk.samples, nuk.parallel,
                                        [&](Stream& rng, std::size_t b, std::size_t e, HitCounter& acc) {
                                            Vector sum(d);
                                            Vector dir(d);
                                            for (std::size_t i = b; i < e; ++i) {
                                                sum.setZero();
                                                for (int j = 0; j < k; ++j) {
                                                    double r = 1.0;
                                                    if (rng.uniform() >= p_atom)
                                                        r = std::pow(mass - rng.uniform() * (mass - 1.0), -1.0 / a);
                                                    sampler.direction(rng, dir.data());
                                                    sum += r * dir;
                                                }
                                                ++acc.count;
                                                if (region.contains(sum)) ++acc.hits;
                                            }
                                        });
    const double scale = std::pow(mass, k);
    const double p = static_cast<double>(hits.hits) / static_cast<double>(hits.count);
    return {scale * p, scale * std::sqrt(p * (1.0 - p) / static_cast<double>(hits.count)), tag};
}

Evaluation nu_k_eval(const NuK& nuk, const RegionUnion& regions) {
    check_disjoint(regions);
    Evaluation out{0.0, std::nullopt, ""};
    double var = 0.0;
    bool any_se = false;
    for (const auto& r : regions) {
        const auto e = nu_k_eval(nuk, r);
        out.value += e.value;
        out.method = e.method;
        if (e.std_error) {
            any_se = true;
            var += *e.std_error * *e.std_error;
        }
    }
    // Separate MC runs with one seed are correlated; the summed variance is a rough guide only.
    if (any_se) out.std_error = std::sqrt(var);
    return out;
}

}  // namespace truncld
