#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <truncld/ratefn.hpp>

namespace truncld::app {

/// One line of results.csv.
struct ResultRow {
    double n = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double analytic_limit = 0.0;
    std::string method;
    double wall_ms = 0.0;

    /// |estimate - limit| / |limit|, NaN when the limit is 0 or not finite.
    double rel_error() const;
};

inline constexpr const char* kCsvHeader = "n,estimate,se,ci_lo,ci_hi,analytic_limit,rel_error,method,wall_ms";

/// Shortest round-trip formatting is not required; 17 significant digits are.
std::string format_double(double x);

std::string render_csv(const std::vector<ResultRow>& rows);

/// Estimate with CI whiskers against n on a log axis, limit as a dashed line.
std::string render_svg(const std::vector<ResultRow>& rows, const std::string& title, const std::string& y_label);

/// Lambda and its conjugate on the ray s*x, s in [0, s_max]: the dual point is
/// s*lambda_hat where lambda_hat maximises at x.
std::string render_rate_grid(const RateFunction& rf, const Vector& x, double s_max = 2.0, int points = 41);

void write_text(const std::string& path, const std::string& text);

}  // namespace truncld::app
