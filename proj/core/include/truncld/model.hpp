#pragma once

// Generative model: exact Pareto-radial heavy-tailed vectors H = R * Theta with
// P(R > t) = t^-alpha for t >= 1, direction Theta drawn from a spectral measure,
// and the truncation X = H 1(|H| <= M) + (H/|H|)(M + L) 1(|H| > M).

#include <string>
#include <variant>
#include <vector>

#include "truncld/linalg.hpp"

namespace truncld {

struct Atom {
    Vector direction;
    double weight = 0.0;
};

/// Probability measure on the unit sphere: finitely many atoms plus a uniform part.
///
/// In d = 1 the "sphere" is {-1, +1}, so the uniform part is itself a pair of
/// atoms of mass isotropic_weight / 2; effective_atoms() folds it in.
class SpectralMeasure {
public:
    SpectralMeasure(int dim, std::vector<Atom> atoms, double isotropic_weight);

    static SpectralMeasure isotropic(int dim);
    /// Single atom at `direction` (normalised on input check, must already be unit).
    static SpectralMeasure point(const Vector& direction);
    /// Atoms of mass 1/2 at +direction and -direction.
    static SpectralMeasure symmetric_pair(const Vector& direction);

    int dim() const noexcept { return dim_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    double isotropic_weight() const noexcept { return isotropic_weight_; }

    /// Atoms including the d = 1 uniform part; equals atoms() for d >= 2.
    std::vector<Atom> effective_atoms() const;

    /// Sum of w_i s_i. The uniform part contributes nothing.
    Vector mean_direction() const;
    /// Sum of w_i s_i s_i^T + isotropic_weight * I / d.
    Matrix second_moment() const;

    bool is_symmetric(double tol = 1e-12) const;

    /// sigma({x : angle(x, axis) <= half_angle}).
    double cap_mass(const Vector& axis, double half_angle) const;

private:
    int dim_;
    std::vector<Atom> atoms_;
    double isotropic_weight_;
};

/// (alpha, sigma): everything the limit measures mu, nu and nu^(k) depend on.
/// Carries no standing assumptions beyond alpha > 0, so limit objects can be
/// evaluated for spectral measures the generative model itself would refuse.
struct TailShape {
    TailShape(double alpha, SpectralMeasure spectral);

    double alpha;
    SpectralMeasure spectral;

    int dim() const noexcept { return spectral.dim(); }
};

/// Validated generative model. Construction enforces the standing assumptions:
/// symmetric law when alpha = 1, zero mean when alpha > 1.
class PowerLawModel {
public:
    PowerLawModel(double alpha, SpectralMeasure spectral);

    double alpha() const noexcept { return shape_.alpha; }
    int dim() const noexcept { return shape_.dim(); }
    const SpectralMeasure& spectral() const noexcept { return shape_.spectral; }
    const TailShape& shape() const noexcept { return shape_; }
    bool is_symmetric() const { return shape_.spectral.is_symmetric(); }

    /// Returns the first violated standing assumption, or an empty string.
    static std::string check_assumptions(double alpha, const SpectralMeasure& spectral);

private:
    TailShape shape_;
};

struct ZeroTail {};
struct ExponentialTail {
    double rate = 1.0;
};
struct UniformTail {
    double upper = 1.0;
};

/// Law of the overshoot L beyond the truncation radius. All variants have an
/// exponential moment, and P(L > x) = o(x^-a) for every a, so the overshoot
/// condition of the k-th order results holds for every k.
class LightTailLaw {
public:
    using Variant = std::variant<ZeroTail, ExponentialTail, UniformTail>;

    LightTailLaw() = default;
    explicit LightTailLaw(Variant v);

    static LightTailLaw zero() { return LightTailLaw(ZeroTail{}); }
    static LightTailLaw exponential(double rate) { return LightTailLaw(ExponentialTail{rate}); }
    static LightTailLaw uniform(double upper) { return LightTailLaw(UniformTail{upper}); }

    const Variant& variant() const noexcept { return v_; }
    bool is_zero() const noexcept { return std::holds_alternative<ZeroTail>(v_); }

    double mean() const;
    /// P(L > x).
    double survival(double x) const;
    /// Essential supremum (infinity for the exponential law).
    double upper_bound() const;
    std::string kind() const;
    double param() const;

    /// P(L > x) = o(P(|H| > x)^(k-1)) for the Pareto radial law of index alpha.
    bool satisfies_order_condition(int k, double alpha) const;

private:
    Variant v_{ZeroTail{}};
};

/// M_n = coeff * n^exponent, plus the overshoot law and the gamma used for b_n at alpha = 2.
struct TruncationSchedule {
    TruncationSchedule(double coeff, double exponent, LightTailLaw light_tail = {}, double gamma_md = 0.5);

    double coeff;
    double exponent;
    LightTailLaw light_tail;
    double gamma_md;

    double threshold(double n) const;
};

enum class RegimeKind { Soft, Hard, Intermediate };

struct Regime {
    RegimeKind kind;
    /// Soft regime only: the extra growth conditions at alpha = 2 and alpha > 2.
    bool side_conditions_ok = false;
    /// n P(|H| > M_n) = coeff^-alpha * n^exceedance_exponent.
    double exceedance_exponent = 0.0;
};

std::string to_string(RegimeKind kind);

/// P(|H| > t) = min(1, t^-alpha).
double tail_prob(double alpha, double t);
inline double tail_prob(const PowerLawModel& model, double t) { return tail_prob(model.alpha(), t); }

/// a_n = n^(1/alpha): n P(|H| > a_n r) = r^-alpha.
double norming_a(const PowerLawModel& model, double n);

/// b_n: n^(1/alpha) for alpha < 2, sqrt(n^(1+gamma)) at alpha = 2, sqrt(n log n) above.
double norming_b(const PowerLawModel& model, const TruncationSchedule& schedule, double n);

/// n P(|H| > M_n).
double exceedance_mass(const PowerLawModel& model, const TruncationSchedule& schedule, double n);

Regime classify_regime(const PowerLawModel& model, const TruncationSchedule& schedule);

/// h if |h| <= m, otherwise the point at radius m + l in the direction of h.
Vector truncate(const Vector& h, double m, double l);

/// E X_n1 in closed form.
Vector truncated_mean(const PowerLawModel& model, const TruncationSchedule& schedule, double n);

/// E[R 1(R <= m)] for the Pareto radial law.
double truncated_radial_mean(double alpha, double m);

}  // namespace truncld
