#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace truncld::app {

double ResultRow::rel_error() const {
    if (analytic_limit == 0.0 || !std::isfinite(analytic_limit)) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(estimate - analytic_limit) / std::abs(analytic_limit);
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.n) << ',' << format_double(r.estimate) << ',' << format_double(r.se) << ','
           << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ',' << format_double(r.analytic_limit) << ','
           << format_double(r.rel_error()) << ',' << r.method << ',' << format_double(r.wall_ms) << '\n';
    }
    return os.str();
}

std::string render_rate_grid(const RateFunction& rf, const Vector& x, double s_max, int points) {
    const auto at_x = legendre(rf, x);
    const Vector lam = at_x.finite() ? at_x.argmax : Vector::Zero(x.size());
    std::ostringstream os;
    os << "s,lambda_norm,Lambda,x_norm,Lambda_star\n";
    for (int i = 0; i < points; ++i) {
        const double t = s_max * i / (points - 1);
        const auto c = legendre(rf, t * x);
        os << format_double(t) << ',' << format_double(t * lam.norm()) << ',' << format_double(rf.value(t * lam))
           << ',' << format_double(t * x.norm()) << ',' << format_double(c.value) << '\n';
    }
    return os.str();
}

namespace {

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows, const std::string& title, const std::string& y_label) {
    const double W = 720, H = 480, L = 80, R = 160, T = 40, B = 60;
    std::vector<const ResultRow*> pts;
    for (const auto& r : rows)
        if (r.n > 0 && std::isfinite(r.estimate)) pts.push_back(&r);

    double xmin = 1, xmax = 10, ymin = 0, ymax = 1;
    if (!pts.empty()) {
        xmin = xmax = std::log10(pts.front()->n);
        ymin = ymax = pts.front()->estimate;
        for (const auto* p : pts) {
            xmin = std::min(xmin, std::log10(p->n));
            xmax = std::max(xmax, std::log10(p->n));
            for (double v : {p->estimate, p->ci_lo, p->ci_hi, p->analytic_limit})
                if (std::isfinite(v)) {
                    ymin = std::min(ymin, v);
                    ymax = std::max(ymax, v);
                }
        }
    }
    if (xmax - xmin < 1e-9) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    double pad = 0.08 * (ymax - ymin);
    if (pad <= 0) pad = std::max(1e-3, 0.1 * std::abs(ymax));
    ymin -= pad;
    ymax += pad;
    const double xpad = 0.05 * (xmax - xmin);
    xmin -= xpad;
    xmax += xpad;

    auto sx = [&](double n) { return L + (std::log10(n) - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Decade ticks on the n axis; fall back to the data points when the span is short.
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) ticks.push_back(std::pow(10.0, e));
    if (ticks.size() < 2)
        for (const auto* p : pts) ticks.push_back(p->n);
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    for (double t : ticks) {
        const double x = sx(t);
        os << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double v = ymin + (ymax - ymin) * i / 5.0;
        const double y = sy(v);
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">n (log scale)</text>\n";
    os << "<text transform=\"translate(20," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(y_label)
       << "</text>\n";

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::map<std::string, int> colour;
    for (const auto* p : pts) colour.emplace(p->method, static_cast<int>(colour.size()) % 5);

    // Limit line(s): one per distinct finite limit.
    std::vector<double> limits;
    for (const auto* p : pts)
        if (std::isfinite(p->analytic_limit) &&
            std::none_of(limits.begin(), limits.end(), [&](double v) { return v == p->analytic_limit; }))
            limits.push_back(p->analytic_limit);
    for (double v : limits) {
        const double y = sy(v);
        os << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << W - R << "\" y2=\"" << y
           << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (const auto* p : pts) {
        const int c = colour[p->method];
        const double x = sx(p->n) + 6.0 * (c - 0.5 * (static_cast<double>(colour.size()) - 1));
        const char* col = palette[c];
        if (std::isfinite(p->ci_lo) && std::isfinite(p->ci_hi)) {
            os << "<line x1=\"" << x << "\" y1=\"" << sy(p->ci_lo) << "\" x2=\"" << x << "\" y2=\"" << sy(p->ci_hi)
               << "\" stroke=\"" << col << "\"/>\n";
            for (double v : {p->ci_lo, p->ci_hi})
                os << "<line x1=\"" << x - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << x + 4 << "\" y2=\"" << sy(v)
                   << "\" stroke=\"" << col << "\"/>\n";
        }
        os << "<circle cx=\"" << x << "\" cy=\"" << sy(p->estimate) << "\" r=\"3.5\" fill=\"" << col << "\"/>\n";
    }

    double ly = T + 10;
    for (const auto& [name, c] : colour) {
        os << "<circle cx=\"" << W - R + 20 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << palette[c] << "\"/>\n";
        os << "<text x=\"" << W - R + 30 << "\" y=\"" << ly + 4 << "\">" << esc(name) << "</text>\n";
        ly += 18;
    }
    if (!limits.empty()) {
        os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 28 << "\" y2=\"" << ly
           << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        os << "<text x=\"" << W - R + 30 << "\" y=\"" << ly + 4 << "\">analytic limit</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace truncld::app
