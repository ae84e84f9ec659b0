#include "truncld/ratefn.hpp"

#include <cmath>
#include <numbers>

#include "truncld/error.hpp"
#include "truncld/quadrature.hpp"

namespace truncld {

namespace {

// (e^y - 1)/y and (e^y - 1 - y)/y^2 without cancellation near 0.
double phi1(double y) {
    if (std::abs(y) < 1e-5) return 1.0 + y / 2.0 + y * y / 6.0;
    return std::expm1(y) / y;
}

double phi2(double y) {
    if (std::abs(y) < 1e-2) {
        return 0.5 + y * (1.0 / 6.0 + y * (1.0 / 24.0 + y * (1.0 / 120.0 + y * (1.0 / 720.0 + y / 5040.0))));
    }
    return (std::expm1(y) - y) / (y * y);
}

constexpr int kPolarNodes = 64;

}  // namespace

std::string to_string(RateCase c) {
    switch (c) {
        case RateCase::SubCritical: return "subcritical";
        case RateCase::Critical: return "critical";
        case RateCase::SuperCritical: return "supercritical";
        case RateCase::Quadratic: return "quadratic";
    }
    return "unknown";
}

RateFunction RateFunction::for_model(const PowerLawModel& model) { return for_shape(model.shape()); }

RateFunction RateFunction::for_shape(const TailShape& shape) {
    const double a = shape.alpha;
    if (a >= 2.0)
        throw_invalid("the hard-regime Lambda is defined for alpha < 2; use the quadratic (moderate deviations) case");
    RateFunction rf;
    rf.case_ = a < 1.0 ? RateCase::SubCritical : (a == 1.0 ? RateCase::Critical : RateCase::SuperCritical);
    rf.dim_ = shape.dim();
    rf.shape_ = shape;
    const auto& sp = shape.spectral;
    rf.atoms_ = sp.effective_atoms();
    rf.iso_ = rf.dim_ > 1 ? sp.isotropic_weight() : 0.0;
    rf.drift_ = Vector::Zero(rf.dim_);
    if (rf.case_ == RateCase::SuperCritical) rf.drift_ = sp.mean_direction() / (a - 1.0);
    if (rf.iso_ > 0.0) {
        // Polar angle of a uniform direction has density proportional to sin^(d-2).
        const auto rule = gauss_legendre(kPolarNodes, 0.0, std::numbers::pi);
        double norm = 0.0;
        for (int i = 0; i < kPolarNodes; ++i) {
            const double w = rule.weights[i] * std::pow(std::sin(rule.nodes[i]), rf.dim_ - 2);
            rf.iso_cos_.push_back(std::cos(rule.nodes[i]));
            rf.iso_w_.push_back(w);
            norm += w;
        }
        for (double& w : rf.iso_w_) w /= norm;
    }
    return rf;
}

RateFunction RateFunction::quadratic(Matrix d) {
    if (d.rows() != d.cols() || d.rows() < 1) throw_invalid("quadratic rate needs a square matrix");
    if ((d - d.transpose()).norm() > 1e-12 * (1.0 + d.norm())) throw_invalid("quadratic rate needs a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(d);
    if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()))
        throw_invalid("quadratic rate needs a positive semidefinite matrix");
    RateFunction rf;
    rf.case_ = RateCase::Quadratic;
    rf.dim_ = static_cast<int>(d.rows());
    rf.d_ = std::move(d);
    return rf;
}

RateFunction::Radial RateFunction::radial(double t, bool need1, bool need2) const {
    const double a = shape_->alpha;
    const bool sub = case_ == RateCase::SubCritical;
    const double tol = tolerance;
    Radial out;
    // Radial atom at r = 1.
    const double et = std::exp(t);
    out.g0 = sub ? std::expm1(t) : std::expm1(t) - t;
    out.g1 = sub ? et : std::expm1(t);
    out.g2 = et;
    if (t != 0.0) {
        if (sub) {
            out.g0 += integrate_ts([=](double r) { return a * t * phi1(r * t) * std::pow(r, -a); }, 0.0, 1.0, tol);
        } else {
            out.g0 += integrate_ts([=](double r) { return a * t * t * phi2(r * t) * std::pow(r, 1.0 - a); }, 0.0, 1.0, tol);
        }
    }
    if (need1) {
        if (sub) {
            out.g1 += integrate_ts([=](double r) { return a * std::exp(r * t) * std::pow(r, -a); }, 0.0, 1.0, tol);
        } else if (t != 0.0) {
            out.g1 += integrate_ts([=](double r) { return a * t * phi1(r * t) * std::pow(r, 1.0 - a); }, 0.0, 1.0, tol);
        }
    }
    if (need2) out.g2 += integrate_ts([=](double r) { return a * std::exp(r * t) * std::pow(r, 1.0 - a); }, 0.0, 1.0, tol);
    return out;
}

void RateFunction::evaluate(const Vector& lambda, double* value, Vector* grad, Matrix* hess) const {
    if (lambda.size() != dim_) throw_invalid("lambda has the wrong dimension");
    if (!lambda.allFinite()) throw_invalid("lambda must be finite");
    if (case_ == RateCase::Quadratic) {
        const Vector dl = d_ * lambda;
        if (value) *value = 0.5 * lambda.dot(dl);
        if (grad) *grad = dl;
        if (hess) *hess = d_;
        return;
    }
    const bool need1 = grad != nullptr;
    const bool need2 = hess != nullptr;
    double v = 0.0;
    Vector g = Vector::Zero(dim_);
    Matrix h = Matrix::Zero(dim_, dim_);
    for (const auto& at : atoms_) {
        if (at.weight == 0.0) continue;
        const auto rad = radial(lambda.dot(at.direction), need1, need2);
        v += at.weight * rad.g0;
        if (need1) g += at.weight * rad.g1 * at.direction;
        if (need2) h += at.weight * rad.g2 * at.direction * at.direction.transpose();
    }
    if (iso_ > 0.0) {
        // Rotation invariance: only the polar angle to lambda matters.
        const double rho = lambda.norm();
        Vector u = Vector::Zero(dim_);
        if (rho > 0.0) {
            u = lambda / rho;
        } else {
            u(0) = 1.0;
        }
        double e0 = 0.0, e1 = 0.0, e2par = 0.0, e2perp = 0.0;
        for (std::size_t i = 0; i < iso_cos_.size(); ++i) {
            const double c = iso_cos_[i];
            const auto rad = radial(rho * c, need1, need2);
            e0 += iso_w_[i] * rad.g0;
            e1 += iso_w_[i] * c * rad.g1;
            e2par += iso_w_[i] * c * c * rad.g2;
            e2perp += iso_w_[i] * (1.0 - c * c) * rad.g2;
        }
        v += iso_ * e0;
        if (need1) g += iso_ * e1 * u;
        if (need2) {
            const Matrix uu = u * u.transpose();
            h += iso_ * (e2par * uu + (e2perp / (dim_ - 1)) * (Matrix::Identity(dim_, dim_) - uu));
        }
    }
    v -= lambda.dot(drift_);
    g -= drift_;
    if (value) *value = v;
    if (grad) *grad = g;
    if (hess) *hess = h;
}

double RateFunction::value(const Vector& lambda) const {
    double v = 0.0;
    evaluate(lambda, &v, nullptr, nullptr);
    return v;
}

Vector RateFunction::gradient(const Vector& lambda) const {
    Vector g;
    evaluate(lambda, nullptr, &g, nullptr);
    return g;
}

Matrix RateFunction::hessian(const Vector& lambda) const {
    Matrix h;
    evaluate(lambda, nullptr, nullptr, &h);
    return h;
}

Matrix d_matrix(const PowerLawModel& model) {
    const double a = model.alpha();
    if (a == 2.0)
        throw_assumption("α=2 is not supported: exact Pareto has E‖H‖²=∞, so D is undefined");
    const Matrix s = model.spectral().second_moment();
    if (a < 2.0) return (2.0 / (2.0 - a)) * s;
    return (a / (a - 2.0)) * s;
}

SpeedWindow speed_window(const PowerLawModel& model, const TruncationSchedule& schedule) {
    const auto regime = classify_regime(model, schedule);
    if (regime.kind != RegimeKind::Hard)
        throw_assumption("moderate deviations require the hard regime: lim nP(‖H‖>M_n)=∞");
    const double a = model.alpha();
    const double rho = schedule.exponent;
    if (a == 2.0)
        throw_assumption("α=2 is not supported: the hard regime assumes E‖H‖²<∞, which fails for exact Pareto");
    SpeedWindow w;
    w.alpha = a;
    w.rho = rho;
    if (a < 2.0) {
        // n^(1/2) M P^(1/2) << c_n << n M P with M = n^rho, P = M^-alpha.
        w.lo = 0.5 + rho * (1.0 - a / 2.0);
        w.hi = 1.0 + rho * (1.0 - a);
    } else if (a < 3.0) {
        // n^(1/2) << c_n << n / (M^3 P).
        w.lo = 0.5;
        w.hi = 1.0 - rho * (3.0 - a);
    } else {
        w.lo = 0.5;
        w.hi = 1.0;
        w.right_open_asymptotic = a == 3.0;
    }
    return w;
}

bool check_cn(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa) {
    return speed_window(model, schedule).contains(kappa);
}

double md_speed(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa, double n) {
    const double cn = std::pow(n, kappa);
    if (model.alpha() >= 2.0) return cn * cn / n;
    const double m = schedule.threshold(n);
    return cn * cn / (n * m * m * tail_prob(model.alpha(), m));
}

double ldp_speed(const PowerLawModel& model, const TruncationSchedule& schedule, double n) {
    return exceedance_mass(model, schedule, n);
}

double ldp_scale(const PowerLawModel& model, const TruncationSchedule& schedule, double n) {
    return exceedance_mass(model, schedule, n) * schedule.threshold(n);
}

}  // namespace truncld
