#include "truncld/estimate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "truncld/error.hpp"
#include "truncld/sampler.hpp"
#include "truncld/tilted.hpp"

namespace truncld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_binom(double n, double k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

void require_soft(const PowerLawModel& model, const TruncationSchedule& schedule) {
    const auto r = classify_regime(model, schedule);
    if (r.kind == RegimeKind::Intermediate)
        throw_assumption("intermediate regime (ρ=1/α) is unsupported: its large deviations are an open problem");
    if (r.kind != RegimeKind::Soft) throw_assumption("soft regime requires lim nP(‖H‖>M_n)=0");
}

void require_hard(const PowerLawModel& model, const TruncationSchedule& schedule) {
    const auto r = classify_regime(model, schedule);
    if (r.kind == RegimeKind::Intermediate)
        throw_assumption("intermediate regime (ρ=1/α) is unsupported: its large deviations are an open problem");
    if (r.kind != RegimeKind::Hard) throw_assumption("hard regime requires lim nP(‖H‖>M_n)=∞");
}

// Plain indicator mean over rows of n truncated summands.
template <class Event>
HitCounter count_rows(const Sampler& sampler, std::size_t n, double m, const RunOptions& opt, Event event) {
    const int d = sampler.dim();
    return run_chunked<HitCounter>(opt.seed, opt.reps, opt.parallel,
                                   [&](Stream& rng, std::size_t b, std::size_t e, HitCounter& acc) {
                                       Vector s(d);
                                       for (std::size_t i = b; i < e; ++i) {
                                           s.setZero();
                                           sampler.add_row(rng, n, m, s.data());
                                           ++acc.count;
                                           if (event(s)) ++acc.hits;
                                       }
                                   });
}

// Delta-method transform of a probability estimate to y = -log p / speed.
EstimateResult to_rate_scale(const EstimateResult& p, double speed) {
    EstimateResult y = p;
    const double inf = std::numeric_limits<double>::infinity();
    y.estimate = p.estimate > 0.0 ? -std::log(p.estimate) / speed : inf;
    y.se = p.estimate > 0.0 ? p.se / (p.estimate * speed) : inf;
    y.ci_lo = p.ci_hi > 0.0 ? -std::log(p.ci_hi) / speed : inf;
    y.ci_hi = p.ci_lo > 0.0 ? -std::log(p.ci_lo) / speed : inf;
    return y;
}

Vector unit_or_e1(const Vector& v) {
    if (v.norm() > 1e-12) return v / v.norm();
    Vector e = Vector::Zero(v.size());
    e(0) = 1.0;
    return e;
}

}  // namespace

double LimitComparison::rel_error() const {
    if (limit == 0.0 || !std::isfinite(limit)) return kNaN;
    return std::abs(estimate.estimate - limit) / std::abs(limit);
}

std::string check_lambda_window(const PowerLawModel& model, const TruncationSchedule& schedule, double e) {
    const double a = model.alpha();
    double b_exp = 1.0 / a;
    bool b_strict_log = false;
    if (a == 2.0) b_exp = 0.5 * (1.0 + schedule.gamma_md);
    if (a > 2.0) {
        b_exp = 0.5;
        b_strict_log = true;  // sqrt(n log n) beats n^(1/2), so equality is not enough
    }
    std::ostringstream os;
    if (!(e > b_exp)) {
        os << "lambda_n = n^" << e << " must grow faster than b_n ~ n^" << b_exp << (b_strict_log ? " sqrt(log n)" : "");
        return os.str();
    }
    if (!(e < schedule.exponent)) {
        os << "lambda_n = n^" << e << " must grow slower than M_n ~ n^" << schedule.exponent;
        return os.str();
    }
    return {};
}

LimitComparison est_ratio_window(const PowerLawModel& model, const TruncationSchedule& schedule,
                                 double lambda_exponent, const RegionUnion& region, std::size_t n,
                                 const RunOptions& opt) {
    require_soft(model, schedule);
    const auto reg = classify_regime(model, schedule);
    if (!reg.side_conditions_ok)
        throw_assumption(model.alpha() == 2.0 ? "soft regime at alpha=2 requires M_n/sqrt(n^(1+gamma)) -> infinity"
                                              : "soft regime at alpha>2 requires M_n/sqrt(n log n) -> infinity");
    if (auto why = check_lambda_window(model, schedule, lambda_exponent); !why.empty()) throw_assumption(why);
    for (const auto& r : region)
        if (r.r_lo < 1.0) throw_invalid("ratio window regions need r_lo >= 1");
    check_disjoint(region);

    const double nn = static_cast<double>(n);
    const double lam = std::pow(nn, lambda_exponent);
    const double m = schedule.threshold(nn);
    const Sampler sampler(model.shape(), schedule.light_tail);
    const auto hits = count_rows(sampler, n, m, opt, [&](Vector& s) {
        s /= lam;
        return contains(region, std::span<const double>(s.data(), s.size()));
    });
    LimitComparison out;
    out.n = nn;
    out.estimate = bernoulli_estimate(hits.hits, hits.count, "plain").scaled(1.0 / (nn * tail_prob(model, lam)));
    out.limit = mu_ratio(model.shape(), region);
    return out;
}

LimitComparison est_kth_order(const PowerLawModel& model, const TruncationSchedule& schedule, int k,
                              const RadialCapRegion& region, std::size_t n, const RunOptions& opt,
                              KthMethod method) {
    require_soft(model, schedule);
    if (k < 1) throw_invalid("k must be >= 1");
    if (static_cast<std::size_t>(k) > n) throw_invalid("k must not exceed n");
    if (!(region.r_lo > k - 1 && region.r_lo < k)) throw_invalid("k-th order regions need r_lo in (k-1, k)");
    if (!schedule.light_tail.satisfies_order_condition(k, model.alpha()))
        throw_assumption("the overshoot law must satisfy P(L>x)=o(P(|H|>x)^(k-1))");
    check_nu_k_continuity(model.shape(), k, region);

    const double nn = static_cast<double>(n);
    const double m = schedule.threshold(nn);
    const double np = nn * tail_prob(model, m);
    const double norm = std::pow(np, k);
    const Sampler sampler(model.shape(), schedule.light_tail);

    LimitComparison out;
    out.n = nn;
    out.limit = nu_k_eval(NuK(model.shape(), k, model.dim() == 1 && k <= 3 ? NuKMethod::ExactQuadrature
                                                                          : NuKMethod::WeightedMonteCarlo),
                          region)
                    .value /
                factorial(k);

    if (method == KthMethod::Plain) {
        const auto hits = count_rows(sampler, n, m, opt, [&](Vector& s) {
            s /= m;
            return region.contains(s);
        });
        out.estimate = bernoulli_estimate(hits.hits, hits.count, "plain").scaled(1.0 / norm);
        return out;
    }

    const double eta = region.r_lo - (k - 1);
    const double t = std::max(1.0, eta * m);
    const double p_eta = tail_prob(model, t);
    const double weight = std::exp(log_binom(nn, k) + k * std::log(p_eta));
    if (np > 0.3) {
        std::ostringstream os;
        os << "KTagged overlap bias: nP = " << np << " exceeds 0.3";
        out.warnings.push_back(os.str());
    }
    const int d = model.dim();
    auto acc = run_chunked<HitCounter>(opt.seed, opt.reps, opt.parallel,
                                       [&](Stream& rng, std::size_t b, std::size_t e, HitCounter& h) {
                                           Vector s(d);
                                           Vector x(d);
                                           for (std::size_t i = b; i < e; ++i) {
                                               s.setZero();
                                               for (int j = 0; j < k; ++j) {
                                                   sampler.sample_x_above(rng, m, t, x.data());
                                                   s += x;
                                               }
                                               sampler.add_row(rng, n - static_cast<std::size_t>(k), m, s.data());
                                               s /= m;
                                               ++h.count;
                                               if (region.contains(s)) ++h.hits;
                                           }
                                       });
    // Every hit carries the same weight, so the plain binomial interval rescales exactly.
    auto est = bernoulli_estimate(acc.hits, acc.count, "ktagged").scaled(weight / norm);
    est.ess = static_cast<double>(acc.hits);
    out.estimate = est;
    return out;
}

LimitComparison est_boundary(const PowerLawModel& model, const TruncationSchedule& schedule, int k,
                             const RadialCapRegion& cap, std::size_t n, const RunOptions& opt,
                             const StableLimit& stable) {
    require_soft(model, schedule);
    if (k < 1) throw_invalid("k must be >= 1");
    StableLimit ref = stable;
    if (ref.mode == StableMode::AnalyticSymmetric && !model.is_symmetric()) ref.mode = StableMode::MonteCarlo;

    const double nn = static_cast<double>(n);
    const double m = schedule.threshold(nn);
    const double norm = std::pow(nn * tail_prob(model, m), k);
    const RadialCapRegion event(k * m, kInf, cap.axis, cap.half_angle);
    const Sampler sampler(model.shape(), schedule.light_tail);
    const auto hits = count_rows(sampler, n, m, opt, [&](Vector& s) { return event.contains(s); });

    LimitComparison out;
    out.n = nn;
    out.estimate = bernoulli_estimate(hits.hits, hits.count, "plain").scaled(1.0 / norm);
    const auto g = gamma_k_eval(model.shape(), ref, k, cap);
    out.limit = g.value;
    if (g.value == 0.0) out.warnings.push_back("reference Gamma_k is 0 (no atoms); compare the upper CI only");
    return out;
}

SlopeResult est_ldp_slope(const PowerLawModel& model, const TruncationSchedule& schedule, const Vector& x,
                          const std::vector<std::size_t>& n_grid, const RunOptions& opt, LdpSampler which) {
    require_hard(model, schedule);
    if (model.alpha() >= 2.0)
        throw_assumption(model.alpha() == 2.0
                             ? "α=2 hard-regime LDP needs E‖H‖²<∞, which fails for exact Pareto"
                             : "the hard-regime LDP with this Lambda covers alpha < 2 only");
    if (x.size() != model.dim()) throw_invalid("x has the wrong dimension");
    if (which == LdpSampler::Tilted) {
        if (model.dim() != 1 || model.spectral().isotropic_weight() > 0.0 || !schedule.light_tail.is_zero())
            throw_invalid("the tilted sampler needs d = 1, an atom-only spectral measure and L = 0");
    }

    const auto rf = RateFunction::for_model(model);
    const auto conj = legendre(rf, x);
    SlopeResult out;
    out.reference_rate = conj.value;
    out.direction = conj.finite() && conj.argmax.norm() > 1e-12 ? unit_or_e1(conj.argmax) : unit_or_e1(x);
    const Vector u = out.direction;
    const double ux = u.dot(x);
    if (which == LdpSampler::Tilted && !conj.finite())
        throw EstimationFailure("Lambda*(x) is infinite, so there is no tilt to sample from");

    const Sampler sampler(model.shape(), schedule.light_tail);
    std::vector<SlopePoint> points;
    std::ostringstream zero;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        const double nn = static_cast<double>(n);
        const double m = schedule.threshold(nn);
        const double speed = ldp_speed(model, schedule, nn);
        const double thr = ux * ldp_scale(model, schedule, nn);
        RunOptions o = opt;
        o.seed = split_seed(opt.seed, gi);

        EstimateResult p;
        if (which == LdpSampler::Plain) {
            const auto hits = count_rows(sampler, n, m, o, [&](const Vector& s) { return u.dot(s) >= thr; });
            p = bernoulli_estimate(hits.hits, hits.count, "plain");
        } else {
            const double sign = u(0);
            const double target = sign * thr / nn;
            if (std::abs(target) >= m * (1.0 - 1e-12)) {
                // At or beyond the largest reachable sum: the event needs every summand at sign * M.
                double q = 0.0;
                if (std::abs(target) <= m * (1.0 + 1e-12)) {
                    for (const auto& a : model.spectral().atoms())
                        if (a.direction(0) * sign > 0.0) q += a.weight;
                    q *= tail_prob(model, m);
                }
                p = EstimateResult{};
                p.estimate = std::pow(q, nn);
                p.ci_lo = p.ci_hi = p.estimate;
                p.samples = o.reps;
                p.method = "tilted";
            } else {
                // Tilt at the finite-n saddlepoint; the limiting lambda-hat / M_n undershoots at desk n.
                const TiltedSummand base(model.shape(), m, 0.0);
                const double theta =
                    sign * base.mean() < sign * target ? saddlepoint_tilt(model.shape(), m, target) : 0.0;
                const TiltedSummand tilted(model.shape(), m, theta);
                const double nlogz = nn * tilted.log_mgf();
                auto acc = run_chunked<MeanAccumulator>(
                    o.seed, o.reps, o.parallel, [&](Stream& rng, std::size_t b, std::size_t e, MeanAccumulator& a) {
                        for (std::size_t i = b; i < e; ++i) {
                            double s = 0.0;
                            for (std::size_t j = 0; j < n; ++j) s += tilted.draw(rng);
                            if (sign * s >= thr) {
                                a.add(std::exp(nlogz - theta * s));
                            } else {
                                a.add_zero();
                            }
                        }
                    });
                p = weighted_estimate(acc, "tilted");
            }
        }
        if (p.estimate == 0.0) zero << (zero.tellp() > 0 ? ", " : "") << n;
        LimitComparison row;
        row.n = nn;
        row.estimate = to_rate_scale(p, speed);
        row.limit = out.reference_rate;
        out.ladder.push_back(row);
        points.push_back({nn, speed, p.estimate, p.se, 0.0});
    }
    if (zero.tellp() > 0) {
        out.failure = "zero hits at n = " + zero.str() + "; try the tilted sampler, more reps or a smaller x";
        return out;
    }
    try {
        out.fit = fit_slope(points);
    } catch (const EstimationFailure& e) {
        out.failure = e.what();
    }
    return out;
}

SlopeResult est_moderate(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa,
                         const Vector& x, const std::vector<std::size_t>& n_grid, const RunOptions& opt) {
    require_hard(model, schedule);
    const auto window = speed_window(model, schedule);
    if (!window.contains(kappa)) {
        std::ostringstream os;
        os << "c_n = n^" << kappa << " lies outside the admissible window (" << window.lo << ", " << window.hi << ")";
        throw_assumption(os.str());
    }
    if (x.size() != model.dim()) throw_invalid("x has the wrong dimension");
    const auto rf = RateFunction::quadratic(d_matrix(model));
    const auto conj = legendre(rf, x);

    SlopeResult out;
    out.reference_rate = conj.value;
    out.direction = conj.finite() && conj.argmax.norm() > 1e-12 ? unit_or_e1(conj.argmax) : unit_or_e1(x);
    const Vector u = out.direction;
    const double ux = u.dot(x);

    const Sampler sampler(model.shape(), schedule.light_tail);
    std::vector<SlopePoint> points;
    std::ostringstream zero;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        const double nn = static_cast<double>(n);
        const double m = schedule.threshold(nn);
        const double cn = std::pow(nn, kappa);
        const double centre = u.dot(truncated_mean(model, schedule, nn)) * nn;
        const double thr = ux * cn + centre;
        const double speed = md_speed(model, schedule, kappa, nn);
        RunOptions o = opt;
        o.seed = split_seed(opt.seed, gi);
        const auto hits = count_rows(sampler, n, m, o, [&](const Vector& s) { return u.dot(s) >= thr; });
        const auto p = bernoulli_estimate(hits.hits, hits.count, "plain");
        if (p.estimate == 0.0) zero << (zero.tellp() > 0 ? ", " : "") << n;
        LimitComparison row;
        row.n = nn;
        row.estimate = to_rate_scale(p, speed);
        row.limit = out.reference_rate;
        out.ladder.push_back(row);
        points.push_back({nn, speed, p.estimate, p.se, 0.0});
    }
    if (zero.tellp() > 0) {
        out.failure = "zero hits at n = " + zero.str() + "; increase reps or reduce x";
        return out;
    }
    try {
        out.fit = fit_slope(points);
    } catch (const EstimationFailure& e) {
        out.failure = e.what();
    }
    return out;
}

double single_summand_prob(const PowerLawModel& model, const TruncationSchedule& schedule,
                           const RadialCapRegion& region) {
    const double a = model.alpha();
    const double m = schedule.threshold(1.0);
    const auto& l = schedule.light_tail;
    const double w = model.spectral().cap_mass(region.axis, region.half_angle);
    // |X| = R on {R <= M}, M + L on {R > M}.
    double p = 0.0;
    const double top = std::min(region.r_hi, m);
    if (top > region.r_lo) p += tail_prob(a, std::max(region.r_lo, 1e-300)) - tail_prob(a, top);
    const double over_hi = std::isinf(region.r_hi) ? 0.0 : l.survival(region.r_hi - m);
    double over = l.survival(region.r_lo - m) - over_hi;
    if (l.is_zero()) over = (region.r_lo < m && m <= region.r_hi) ? 1.0 : 0.0;
    p += tail_prob(a, m) * over;
    return w * p;
}

EstimateResult est_probability(const PowerLawModel& model, const TruncationSchedule& schedule,
                               const RadialCapRegion& region, std::size_t n, const RunOptions& opt) {
    const double m = schedule.threshold(static_cast<double>(n));
    const Sampler sampler(model.shape(), schedule.light_tail);
    const auto hits = count_rows(sampler, n, m, opt, [&](const Vector& s) { return region.contains(s); });
    return bernoulli_estimate(hits.hits, hits.count, "plain");
}

}  // namespace truncld
