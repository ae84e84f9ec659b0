#include "truncld/limits.hpp"

#include <cmath>
#include <numbers>

#include "truncld/error.hpp"
#include "truncld/quadrature.hpp"
#include "truncld/sampler.hpp"

namespace truncld {

namespace {

double cap_weight(const TailShape& shape, const RadialCapRegion& region) {
    if (region.dim() != shape.dim()) throw_invalid("region dimension does not match the model");
    return shape.spectral.cap_mass(region.axis, region.half_angle);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Distinct atom directions with their merged sigma mass (d = 1 uniform part included).
std::vector<Atom> merged_atoms(const SpectralMeasure& sp) {
    std::vector<Atom> out;
    for (const auto& a : sp.effective_atoms()) {
        bool found = false;
        for (auto& b : out) {
            if ((b.direction - a.direction).norm() <= 1e-12) {
                b.weight += a.weight;
                found = true;
                break;
            }
        }
        if (!found && a.weight > 0.0) out.push_back(a);
    }
    return out;
}

}  // namespace

double mu_ratio(const TailShape& shape, const RadialCapRegion& region) {
    if (!(region.r_lo > 0.0)) throw_invalid("mu_ratio needs r_lo > 0 (mu is infinite near the origin)");
    const double a = shape.alpha;
    return (std::pow(region.r_lo, -a) - std::pow(region.r_hi, -a)) * cap_weight(shape, region);
}

double mu_ratio(const TailShape& shape, const RegionUnion& regions) {
    check_disjoint(regions);
    double s = 0.0;
    for (const auto& r : regions) s += mu_ratio(shape, r);
    return s;
}

double nu_eval(const TailShape& shape, const RadialCapRegion& region, NuMethod method) {
    if (!(region.r_lo > 0.0)) throw_invalid("nu_eval needs r_lo > 0");
    const double a = shape.alpha;
    const double w = cap_weight(shape, region);
    double radial = 0.0;
    if (region.r_lo < 1.0) {
        const double top = std::min(region.r_hi, 1.0);
        if (method == NuMethod::ClosedForm) {
            radial = std::pow(region.r_lo, -a) - std::pow(top, -a);
        } else {
            radial = integrate_ts([a](double r) { return a * std::pow(r, -a - 1.0); }, region.r_lo, top);
        }
    }
    if (region.r_lo <= 1.0 && region.r_hi >= 1.0) radial += 1.0;
    return w * radial;
}

double nu_eval(const TailShape& shape, const RegionUnion& regions, NuMethod method) {
    check_disjoint(regions);
    double s = 0.0;
    for (const auto& r : regions) s += nu_eval(shape, r, method);
    return s;
}

Evaluation gamma_k_eval(const TailShape& shape, const StableLimit& stable, int k, const RadialCapRegion& cap) {
    if (k < 1) throw_invalid("gamma_k_eval needs k >= 1");
    if (cap.dim() != shape.dim()) throw_invalid("cap dimension does not match the model");
    const double kf = factorial(k);
    const auto atoms = merged_atoms(shape.spectral);
    const int d = shape.dim();
    const double iso = d > 1 ? shape.spectral.isotropic_weight() : 0.0;

    if (stable.mode == StableMode::AnalyticSymmetric) {
        if (!shape.spectral.is_symmetric())
            throw_invalid("AnalyticSymmetric stable limit requested for an asymmetric spectral measure");
        if (k == 1) return {0.5 * cap_weight(shape, cap), std::nullopt, "analytic_symmetric"};
        double s = 0.0;
        for (const auto& at : atoms)
            if (cap.direction_in_cap(std::span<const double>(at.direction.data(), d)))
                s += 0.5 * std::pow(at.weight, k);
        return {s / kf, std::nullopt, "analytic_symmetric"};
    }

    // Monte Carlo: per replication, T = sum of n_approx copies of H; the scale of
    // T is irrelevant for sign events.
    std::vector<Atom> in_cap;
    for (const auto& at : atoms)
        if (cap.direction_in_cap(std::span<const double>(at.direction.data(), d))) in_cap.push_back(at);
    const double iso_cap = k == 1 ? iso : 0.0;
    if (in_cap.empty() && iso_cap == 0.0) return {0.0, 0.0, "monte_carlo"};

    const Sampler sampler(shape);
    const std::size_t n_approx = std::max<std::size_t>(1, stable.n_approx);
    auto acc = run_chunked<MeanAccumulator>(
        stable.seed, stable.samples, stable.parallel,
        [&](Stream& rng, std::size_t b, std::size_t e, MeanAccumulator& out) {
            Vector t(d);
            Vector h(d);
            Vector u(d);
            for (std::size_t i = b; i < e; ++i) {
                t.setZero();
                for (std::size_t j = 0; j < n_approx; ++j) {
                    const double r = sampler.radius(rng);
                    sampler.direction(rng, h.data());
                    t += r * h;
                }
                double y = 0.0;
                for (const auto& at : in_cap)
                    if (at.direction.dot(t) >= 0.0) y += k == 1 ? at.weight : std::pow(at.weight, k) / kf;
                if (iso_cap > 0.0) {
                    // Uniform direction on the sphere, independent of T.
                    for (int c = 0; c < d; ++c) u(c) = rng.normal();
                    u.normalize();
                    if (cap.direction_in_cap(std::span<const double>(u.data(), d)) && u.dot(t) >= 0.0) y += iso_cap;
                }
                out.add(y);
            }
        });
    const auto est = weighted_estimate(acc, "monte_carlo");
    return {est.estimate, est.se, "monte_carlo"};
}

double prokhorov_bound(std::size_t n_terms, double bound_c, double variance, double lambda) {
    if (n_terms < 1) throw_invalid("prokhorov_bound needs n_terms >= 1");
    if (!(bound_c > 0.0) || !(variance > 0.0) || !(lambda > 0.0))
        throw_invalid("prokhorov_bound needs positive bound, variance and lambda");
    return std::exp(-(lambda / (2.0 * bound_c)) * std::asinh(bound_c * lambda / (2.0 * variance)));
}

XtCheck xt_limit_check(const TailShape& shape, const LightTailLaw& light_tail, double t,
                       const RadialCapRegion& region, std::size_t mc_samples, std::uint64_t seed,
                       const ParallelConfig& parallel) {
    if (!(region.r_lo > 0.0 && region.r_lo < 1.0)) throw_invalid("xt_limit_check needs r_lo in (0, 1)");
    if (!(t >= 1.0)) throw_invalid("xt_limit_check needs t >= 1");
    const double a = shape.alpha;
    const double w = cap_weight(shape, region);
    const double pt = tail_prob(a, t);

    // Radius of X^t/t is R/t below the threshold and 1 + L/t above it.
    const double below = tail_prob(a, t * region.r_lo) - tail_prob(a, t * std::min(region.r_hi, 1.0));
    const double above = pt * (light_tail.survival(t * (region.r_lo - 1.0)) -
                               (std::isinf(region.r_hi) ? 0.0 : light_tail.survival(t * (region.r_hi - 1.0))));
    XtCheck out;
    out.finite_t = w * (std::max(0.0, below) + above) / pt;
    out.limit = nu_eval(shape, region);

    if (mc_samples > 0) {
        const Sampler sampler(shape, light_tail);
        const int d = shape.dim();
        auto hits = run_chunked<HitCounter>(seed, mc_samples, parallel,
                                            [&](Stream& rng, std::size_t b, std::size_t e, HitCounter& acc) {
                                                Vector x(d);
                                                for (std::size_t i = b; i < e; ++i) {
                                                    sampler.sample_x(rng, t, x.data());
                                                    x /= t;
                                                    ++acc.count;
                                                    if (region.contains(x)) ++acc.hits;
                                                }
                                            });
        out.empirical = bernoulli_estimate(hits.hits, hits.count, "plain").scaled(1.0 / pt);
    }
    return out;
}

}  // namespace truncld
