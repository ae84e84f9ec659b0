#include "truncld/model.hpp"

#include <cmath>
#include <sstream>

#include "truncld/error.hpp"
#include "truncld/region.hpp"

namespace truncld {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kMassTol = 1e-12;

// Total atom weight at direction s (directions compared to 1e-12).
double weight_at(const std::vector<Atom>& atoms, const Vector& s) {
    double w = 0.0;
    for (const auto& a : atoms)
        if ((a.direction - s).norm() <= 1e-12) w += a.weight;
    return w;
}

}  // namespace

SpectralMeasure::SpectralMeasure(int dim, std::vector<Atom> atoms, double isotropic_weight)
    : dim_(dim), atoms_(std::move(atoms)), isotropic_weight_(isotropic_weight) {
    if (dim_ < 1) throw_invalid("spectral measure: dimension must be >= 1");
    if (!(isotropic_weight_ >= 0.0)) throw_invalid("spectral measure: isotropic_weight must be >= 0");
    double total = isotropic_weight_;
    for (const auto& a : atoms_) {
        if (a.direction.size() != dim_) throw_invalid("spectral measure: atom direction has wrong dimension");
        if (std::abs(a.direction.norm() - 1.0) > kUnitTol)
            throw_invalid("spectral measure: atom direction must have unit norm");
        if (!(a.weight >= 0.0)) throw_invalid("spectral measure: atom weights must be >= 0");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "spectral measure: total mass must be 1, got " << total;
        throw_invalid(os.str());
    }
}

SpectralMeasure SpectralMeasure::isotropic(int dim) { return SpectralMeasure(dim, {}, 1.0); }

SpectralMeasure SpectralMeasure::point(const Vector& direction) {
    return SpectralMeasure(static_cast<int>(direction.size()), {Atom{direction, 1.0}}, 0.0);
}

SpectralMeasure SpectralMeasure::symmetric_pair(const Vector& direction) {
    return SpectralMeasure(static_cast<int>(direction.size()),
                           {Atom{direction, 0.5}, Atom{-direction, 0.5}}, 0.0);
}

std::vector<Atom> SpectralMeasure::effective_atoms() const {
    std::vector<Atom> out = atoms_;
    if (dim_ == 1 && isotropic_weight_ > 0.0) {
        out.push_back(Atom{Vector::Constant(1, 1.0), 0.5 * isotropic_weight_});
        out.push_back(Atom{Vector::Constant(1, -1.0), 0.5 * isotropic_weight_});
    }
    return out;
}

Vector SpectralMeasure::mean_direction() const {
    Vector m = Vector::Zero(dim_);
    for (const auto& a : atoms_) m += a.weight * a.direction;
    return m;
}

Matrix SpectralMeasure::second_moment() const {
    Matrix s = Matrix::Identity(dim_, dim_) * (isotropic_weight_ / dim_);
    for (const auto& a : atoms_) s += a.weight * a.direction * a.direction.transpose();
    return s;
}

bool SpectralMeasure::is_symmetric(double tol) const {
    for (const auto& a : atoms_) {
        if (std::abs(weight_at(atoms_, a.direction) - weight_at(atoms_, -a.direction)) > tol) return false;
    }
    return true;
}

double SpectralMeasure::cap_mass(const Vector& axis, double half_angle) const {
    if (axis.size() != dim_) throw_invalid("cap axis has wrong dimension");
    RadialCapRegion cap(0.0, kInf, axis, half_angle);
    double m = isotropic_weight_ * cap_fraction(dim_, half_angle);
    for (const auto& a : atoms_)
        if (cap.direction_in_cap(std::span<const double>(a.direction.data(), a.direction.size()))) m += a.weight;
    return m;
}

TailShape::TailShape(double a, SpectralMeasure s) : alpha(a), spectral(std::move(s)) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw_invalid("alpha must be a finite positive number");
}

std::string PowerLawModel::check_assumptions(double alpha, const SpectralMeasure& spectral) {
    if (!(alpha > 0.0)) return "alpha must be > 0";
    if (alpha == 1.0 && !spectral.is_symmetric()) return "α=1 requires symmetric distribution";
    if (alpha > 1.0 && spectral.mean_direction().norm() > 1e-12)
        return "α>1 requires E(H)=0 (the spectral mean direction must vanish)";
    return {};
}

PowerLawModel::PowerLawModel(double alpha, SpectralMeasure spectral) : shape_(alpha, std::move(spectral)) {
    if (auto why = check_assumptions(shape_.alpha, shape_.spectral); !why.empty()) throw_assumption(why);
}

LightTailLaw::LightTailLaw(Variant v) : v_(std::move(v)) {
    if (auto* e = std::get_if<ExponentialTail>(&v_); e && !(e->rate > 0.0))
        throw_invalid("exponential light tail needs rate > 0");
    if (auto* u = std::get_if<UniformTail>(&v_); u && !(u->upper > 0.0))
        throw_invalid("uniform light tail needs upper > 0");
}

double LightTailLaw::mean() const {
    if (auto* e = std::get_if<ExponentialTail>(&v_)) return 1.0 / e->rate;
    if (auto* u = std::get_if<UniformTail>(&v_)) return 0.5 * u->upper;
    return 0.0;
}

double LightTailLaw::survival(double x) const {
    if (x < 0.0) return 1.0;
    if (auto* e = std::get_if<ExponentialTail>(&v_)) return std::exp(-e->rate * x);
    if (auto* u = std::get_if<UniformTail>(&v_)) return x >= u->upper ? 0.0 : 1.0 - x / u->upper;
    return 0.0;
}

double LightTailLaw::upper_bound() const {
    if (std::holds_alternative<ExponentialTail>(v_)) return kInf;
    if (auto* u = std::get_if<UniformTail>(&v_)) return u->upper;
    return 0.0;
}

std::string LightTailLaw::kind() const {
    if (std::holds_alternative<ExponentialTail>(v_)) return "exponential";
    if (std::holds_alternative<UniformTail>(v_)) return "uniform";
    return "zero";
}

double LightTailLaw::param() const {
    if (auto* e = std::get_if<ExponentialTail>(&v_)) return e->rate;
    if (auto* u = std::get_if<UniformTail>(&v_)) return u->upper;
    return 0.0;
}

bool LightTailLaw::satisfies_order_condition(int k, double alpha) const {
    // Every variant has P(L > x) <= C e^{-cx}, which beats any power x^{-alpha(k-1)}.
    return k >= 1 && alpha > 0.0;
}

TruncationSchedule::TruncationSchedule(double c, double rho, LightTailLaw l, double g)
    : coeff(c), exponent(rho), light_tail(std::move(l)), gamma_md(g) {
    if (!(coeff > 0.0)) throw_invalid("trunc_coeff must be > 0");
    if (!(exponent > 0.0)) throw_invalid("trunc_exponent must be > 0");
    if (!(gamma_md > 0.0)) throw_invalid("gamma_md must be > 0");
}

double TruncationSchedule::threshold(double n) const { return coeff * std::pow(n, exponent); }

std::string to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::Soft: return "soft";
        case RegimeKind::Hard: return "hard";
        case RegimeKind::Intermediate: return "intermediate";
    }
    return "unknown";
}

double tail_prob(double alpha, double t) {
    if (!(t > 0.0)) throw_invalid("tail_prob needs t > 0");
    if (t <= 1.0) return 1.0;
    return std::pow(t, -alpha);
}

double norming_a(const PowerLawModel& model, double n) { return std::pow(n, 1.0 / model.alpha()); }

double norming_b(const PowerLawModel& model, const TruncationSchedule& schedule, double n) {
    const double a = model.alpha();
    if (a < 2.0) return std::pow(n, 1.0 / a);
    if (a == 2.0) return std::sqrt(std::pow(n, 1.0 + schedule.gamma_md));
    return std::sqrt(n * std::log(n));
}

double exceedance_mass(const PowerLawModel& model, const TruncationSchedule& schedule, double n) {
    return n * tail_prob(model.alpha(), schedule.threshold(n));
}

Regime classify_regime(const PowerLawModel& model, const TruncationSchedule& schedule) {
    const double a = model.alpha();
    const double rho = schedule.exponent;
    Regime r{};
    r.exceedance_exponent = 1.0 - a * rho;
    if (std::abs(a * rho - 1.0) <= 1e-12) {
        r.kind = RegimeKind::Intermediate;
    } else if (rho > 1.0 / a) {
        r.kind = RegimeKind::Soft;
        r.side_conditions_ok = a < 2.0 || rho > 0.5;
    } else {
        r.kind = RegimeKind::Hard;
    }
    return r;
}

Vector truncate(const Vector& h, double m, double l) {
    const double r = h.norm();
    if (!(r > 0.0)) throw_invalid("truncate needs a non-zero vector");
    if (!(m > 0.0)) throw_invalid("truncate needs m > 0");
    if (!(l >= 0.0)) throw_invalid("truncate needs l >= 0");
    if (r <= m) return h;
    return h * ((m + l) / r);
}

double truncated_radial_mean(double alpha, double m) {
    if (m <= 1.0) return 0.0;
    if (alpha == 1.0) return std::log(m);
    return alpha * (1.0 - std::pow(m, 1.0 - alpha)) / (alpha - 1.0);
}

Vector truncated_mean(const PowerLawModel& model, const TruncationSchedule& schedule, double n) {
    const Vector dir = model.spectral().mean_direction();
    if (dir.norm() == 0.0) return Vector::Zero(model.dim());
    const double a = model.alpha();
    const double m = schedule.threshold(n);
    const double radial = truncated_radial_mean(a, m) + (m + schedule.light_tail.mean()) * tail_prob(a, m);
    return dir * radial;
}

}  // namespace truncld
