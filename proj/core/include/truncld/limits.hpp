#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "truncld/model.hpp"
#include "truncld/parallel.hpp"
#include "truncld/region.hpp"
#include "truncld/stats.hpp"

namespace truncld {

/// Value of a limit object with an optional Monte Carlo standard error.
struct Evaluation {
    double value = 0.0;
    std::optional<double> std_error;
    std::string method;
};

/// mu(A)/mu(B_1^c) = (r_lo^-alpha - r_hi^-alpha) * sigma(cap). Needs r_lo > 0.
double mu_ratio(const TailShape& shape, const RadialCapRegion& region);
double mu_ratio(const TailShape& shape, const RegionUnion& regions);

enum class NuMethod { ClosedForm, Quadrature };

/// nu = sigma x gamma with gamma(dr) = alpha r^(-alpha-1) dr on (0,1] plus a unit
/// atom at r = 1. The atom is counted when r_lo <= 1 <= r_hi, so that
/// nu({|x| > r}) = r^-alpha holds for every r in (0, 1].
double nu_eval(const TailShape& shape, const RadialCapRegion& region, NuMethod method = NuMethod::ClosedForm);
double nu_eval(const TailShape& shape, const RegionUnion& regions, NuMethod method = NuMethod::ClosedForm);

enum class NuKMethod { ExactQuadrature, WeightedMonteCarlo };

/// Evaluator for the k-fold convolution nu^(k).
struct NuK {
    NuK(TailShape shape, int k, NuKMethod method = NuKMethod::ExactQuadrature);

    TailShape shape;
    int k;
    NuKMethod method;
    double tolerance = 1e-10;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    ParallelConfig parallel{};
};

/// Requires r_lo > k-1; returns 0 once r_lo >= k. Rejects regions whose boundary
/// carries an atom of nu^(k). ExactQuadrature supports d = 1 and k <= 3.
Evaluation nu_k_eval(const NuK& nuk, const RadialCapRegion& region);
Evaluation nu_k_eval(const NuK& nuk, const RegionUnion& regions);

/// Throws InvalidArgument if |sum of k sphere atoms| or its angle to the cap axis
/// falls on the region boundary.
void check_nu_k_continuity(const TailShape& shape, int k, const RadialCapRegion& region);

enum class StableMode { AnalyticSymmetric, MonteCarlo };

/// Stand-in for the (alpha ^ 2)-stable limit V of the untruncated normalised sums.
/// Only sign events <s, V> >= 0 are ever queried, and those are invariant under
/// the (unknown) normalising constant, so the Monte Carlo mode uses sum of
/// n_approx raw copies of H.
struct StableLimit {
    StableMode mode = StableMode::AnalyticSymmetric;
    std::size_t n_approx = 1000;
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    ParallelConfig parallel{};
};

/// Gamma_1(cap) = int_cap P(<x, V> >= 0) sigma(dx);
/// Gamma_k(cap) = (1/k!) sum over atoms s in cap of P(<s, V> >= 0) sigma({s})^k.
/// The cap is the direction part of `cap`; radii are ignored.
Evaluation gamma_k_eval(const TailShape& shape, const StableLimit& stable, int k, const RadialCapRegion& cap);

/// exp{-(lambda / 2C) asinh(C lambda / (2 variance))}.
double prokhorov_bound(std::size_t n_terms, double bound_c, double variance, double lambda);

struct XtCheck {
    double finite_t = 0.0;  // exact P(X^t/t in A) / P(|H| > t)
    double limit = 0.0;     // nu(A)
    std::optional<EstimateResult> empirical;
};

/// Single-summand truncation at level t with the schedule's overshoot law.
/// With mc_samples > 0 also runs a Monte Carlo estimate of the ratio.
XtCheck xt_limit_check(const TailShape& shape, const LightTailLaw& light_tail, double t,
                       const RadialCapRegion& region, std::size_t mc_samples = 0, std::uint64_t seed = 1,
                       const ParallelConfig& parallel = {});

}  // namespace truncld
