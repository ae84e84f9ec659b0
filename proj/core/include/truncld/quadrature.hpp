#pragma once

#include <functional>
#include <vector>

namespace truncld {

/// Double-exponential (tanh-sinh) quadrature on a finite interval. Integrable
/// endpoint singularities are fine. Throws NumericalError when the estimated
/// error exceeds max(abs_tol, 1e-8 * L1 norm).
double integrate_ts(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10);

/// Same, integrating piecewise between sorted breakpoints inside (a, b).
double integrate_ts_pieces(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breaks, double abs_tol = 1e-10);

/// Gauss-Legendre nodes and weights mapped to [a, b].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int points, double a, double b);

}  // namespace truncld
