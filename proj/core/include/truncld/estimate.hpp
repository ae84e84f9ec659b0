#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "truncld/limits.hpp"
#include "truncld/model.hpp"
#include "truncld/parallel.hpp"
#include "truncld/ratefn.hpp"
#include "truncld/region.hpp"
#include "truncld/stats.hpp"

namespace truncld {

struct RunOptions {
    std::uint64_t seed = 1;
    std::size_t reps = 10'000;
    ParallelConfig parallel{};
};

struct LimitComparison {
    double n = 0.0;
    EstimateResult estimate;
    double limit = 0.0;
    std::vector<std::string> warnings;

    double rel_error() const;
};

/// Soft-regime window: P(S_n / lambda_n in A) / (n P(|H| > lambda_n)) with
/// lambda_n = n^lambda_exponent, against mu(A)/mu(B_1^c). Regions are in units of lambda_n.
LimitComparison est_ratio_window(const PowerLawModel& model, const TruncationSchedule& schedule,
                                 double lambda_exponent, const RegionUnion& region, std::size_t n,
                                 const RunOptions& opt);

/// Checks the window b_n << lambda_n << M_n; returns an empty string when it holds.
std::string check_lambda_window(const PowerLawModel& model, const TruncationSchedule& schedule, double lambda_exponent);

enum class KthMethod { Plain, KTagged };

/// k-th order: P(S_n / M_n in A) / (n P(|H| > M_n))^k against nu^(k)(A)/k!.
/// KTagged forces k summands beyond eta M_n (eta = r_lo - (k-1)) and reweights by
/// binom(n, k) P(|X| > eta M_n)^k; its overlap bias is flagged when nP > 0.3.
LimitComparison est_kth_order(const PowerLawModel& model, const TruncationSchedule& schedule, int k,
                              const RadialCapRegion& region, std::size_t n, const RunOptions& opt,
                              KthMethod method);

/// Boundary case: P(|S_n| > k M_n, S_n/|S_n| in cap) / (n P(|H| > M_n))^k against Gamma_k(cap).
LimitComparison est_boundary(const PowerLawModel& model, const TruncationSchedule& schedule, int k,
                             const RadialCapRegion& cap, std::size_t n, const RunOptions& opt,
                             const StableLimit& stable = {});

enum class LdpSampler { Plain, Tilted };

struct SlopeResult {
    std::vector<LimitComparison> ladder;  // per n: probability estimate
    SlopeFit fit;
    double reference_rate = 0.0;
    Vector direction;  // u of the half-space <u, y> >= <u, x>
    std::string failure;  // non-empty when the fit could not be formed
};

/// Hard-regime LDP probe: p_n = P(<u, S_n / (n M_n P)> >= <u, x>), fit of
/// -log p_n / speed_n against 1/speed_n with speed n P(|H| > M_n); reference Lambda*(x).
SlopeResult est_ldp_slope(const PowerLawModel& model, const TruncationSchedule& schedule, const Vector& x,
                          const std::vector<std::size_t>& n_grid, const RunOptions& opt, LdpSampler sampler);

/// Moderate deviations: p_n = P(<u, (S_n - E S_n)/c_n> >= <u, x>) with c_n = n^kappa,
/// fitted against beta_n; reference 0.5 <x, D^-1 x>.
SlopeResult est_moderate(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa,
                         const Vector& x, const std::vector<std::size_t>& n_grid, const RunOptions& opt);

/// Exact P(|S_1| > t, direction in cap) for n = 1 (no truncation effect when t < M_1).
double single_summand_prob(const PowerLawModel& model, const TruncationSchedule& schedule,
                           const RadialCapRegion& region);

/// Plain estimate of P(S_n in region) for tests and the n = 1 oracle.
EstimateResult est_probability(const PowerLawModel& model, const TruncationSchedule& schedule,
                               const RadialCapRegion& region, std::size_t n, const RunOptions& opt);

}  // namespace truncld
