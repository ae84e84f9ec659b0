#pragma once

#include <optional>
#include <string>

#include "truncld/linalg.hpp"
#include "truncld/model.hpp"

namespace truncld {

enum class RateCase { SubCritical, Critical, SuperCritical, Quadratic };

std::string to_string(RateCase c);

/// Limiting cumulant function Lambda of the hard-regime LDP (alpha < 2), or the
/// quadratic 0.5 <lambda, D lambda> of the moderate-deviations result.
class RateFunction {
public:
    /// Picks the case from alpha; alpha >= 2 is rejected.
    static RateFunction for_model(const PowerLawModel& model);
    /// Same, without the standing-assumption checks of PowerLawModel.
    static RateFunction for_shape(const TailShape& shape);
    static RateFunction quadratic(Matrix d);

    RateCase rate_case() const noexcept { return case_; }
    int dim() const noexcept { return dim_; }
    const std::optional<TailShape>& shape() const noexcept { return shape_; }
    const Matrix& d() const noexcept { return d_; }

    double value(const Vector& lambda) const;
    Vector gradient(const Vector& lambda) const;
    Matrix hessian(const Vector& lambda) const;

    /// Value, gradient and Hessian from one pass; any output may be null.
    void evaluate(const Vector& lambda, double* value, Vector* grad, Matrix* hess) const;

    double tolerance = 1e-12;

private:
    RateFunction() = default;

    struct Radial {
        double g0 = 0.0;  // int f(r t) gamma(dr)
        double g1 = 0.0;  // int r f'(r t) gamma(dr)
        double g2 = 0.0;  // int r^2 f''(r t) gamma(dr)
    };
    Radial radial(double t, bool need1, bool need2) const;

    RateCase case_ = RateCase::Quadratic;
    int dim_ = 1;
    std::optional<TailShape> shape_;
    Matrix d_;
    std::vector<Atom> atoms_;
    double iso_ = 0.0;
    Vector drift_;
    // Polar-angle rule for the isotropic part (d >= 2): nodes cos(phi), weights.
    std::vector<double> iso_cos_;
    std::vector<double> iso_w_;
};

struct ConjugateResult {
    enum class Status { Converged, Diverged, MaxIterations };
    Status status = Status::Converged;
    double value = 0.0;  // +infinity when Diverged
    Vector argmax;
    double residual = 0.0;
    int iterations = 0;

    bool finite() const noexcept { return status != Status::Diverged; }
};

std::string to_string(ConjugateResult::Status s);

struct LegendreOptions {
    double tol = 1e-10;
    int max_iter = 100;
    double escape_radius = 60.0;
    double armijo_slope = 1e-4;
    double backtrack = 0.5;
};

/// sup over lambda of <lambda, x> - Lambda(lambda), by damped Newton from 0.
ConjugateResult legendre(const RateFunction& rf, const Vector& x, const LegendreOptions& opt = {});

/// Moderate-deviations matrix: (2/(2-alpha)) E[Theta Theta^T] for alpha < 2,
/// alpha/(alpha-2) E[Theta Theta^T] (the covariance of H) for alpha > 2.
Matrix d_matrix(const PowerLawModel& model);

struct SpeedWindow {
    double alpha = 0.0;
    double rho = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool right_open_asymptotic = false;  // alpha = 3: right end is the delta -> 0 limit

    bool contains(double kappa) const noexcept { return kappa > lo && kappa < hi; }
    bool non_vacuous() const noexcept { return lo < hi; }
};

/// Admissible exponents kappa for c_n = n^kappa; requires the hard regime and alpha != 2.
SpeedWindow speed_window(const PowerLawModel& model, const TruncationSchedule& schedule);
bool check_cn(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa);

/// beta_n = c_n^2 / (n M_n^2 P(|H| > M_n)) for alpha < 2, c_n^2 / n for alpha >= 2.
double md_speed(const PowerLawModel& model, const TruncationSchedule& schedule, double kappa, double n);

/// Hard-regime LDP speed n P(|H| > M_n) and normalisation n M_n P(|H| > M_n).
double ldp_speed(const PowerLawModel& model, const TruncationSchedule& schedule, double n);
double ldp_scale(const PowerLawModel& model, const TruncationSchedule& schedule, double n);

}  // namespace truncld
