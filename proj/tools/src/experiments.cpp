#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <truncld/error.hpp>
#include <truncld/estimate.hpp>
#include <truncld/limits.hpp>
#include <truncld/ratefn.hpp>

namespace truncld::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

json vec_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

json region_json(const RadialCapRegion& r) {
    return {{"r_lo", r.r_lo}, {"r_hi", num(r.r_hi)}, {"axis", vec_json(r.axis)}, {"half_angle", r.half_angle}};
}

ResultRow to_row(const LimitComparison& lc, double wall_ms) {
    return {lc.n, lc.estimate.estimate, lc.estimate.se, lc.estimate.ci_lo, lc.estimate.ci_hi, lc.limit,
            lc.estimate.method, wall_ms};
}

json record(const std::string& experiment, const ResultRow& r, double wall_ms, json extra = json::object()) {
    json params = {{"n", num(r.n)}};
    params.update(extra);
    return {{"experiment", experiment},
            {"params", params},
            {"estimate", num(r.estimate)},
            {"se", num(r.se)},
            {"ci", {num(r.ci_lo), num(r.ci_hi)}},
            {"limit", num(r.analytic_limit)},
            {"rel_error", num(r.rel_error())},
            {"method", r.method},
            {"wall_time", wall_ms / 1000.0}};
}

RunOptions options(const RunSettings& s, std::uint64_t stream) {
    RunOptions o;
    o.seed = split_seed(s.seed, stream);
    o.reps = s.reps;
    o.parallel = s.parallel;
    return o;
}

struct Recorder {
    const std::string& experiment;
    const RunSettings& settings;
    Outcome& out;

    void add(const LimitComparison& lc, double wall_ms, json extra = json::object()) {
        ResultRow row = to_row(lc, settings.timing ? wall_ms : 0.0);
        out.rows.push_back(row);
        json rec = record(experiment, row, wall_ms, std::move(extra));
        if (!lc.warnings.empty()) rec["warnings"] = lc.warnings;
        out.summary["records"].push_back(rec);
    }
};

json regime_json(const PowerLawModel& model, const TruncationSchedule& schedule) {
    const auto r = classify_regime(model, schedule);
    json j = {{"regime", to_string(r.kind)}, {"exceedance_exponent", r.exceedance_exponent}};
    if (r.kind == RegimeKind::Soft) j["side_conditions_ok"] = r.side_conditions_ok;
    return j;
}

json fit_json(const SlopeResult& s) {
    json j = {{"reference_rate", num(s.reference_rate)}, {"direction", vec_json(s.direction)}};
    if (!s.failure.empty()) {
        j["failure"] = s.failure;
        return j;
    }
    j["rate"] = num(s.fit.rate);
    j["slope"] = num(s.fit.slope);
    j["residual"] = num(s.fit.residual);
    j["rel_error"] = s.reference_rate != 0.0 && std::isfinite(s.reference_rate)
                         ? num(std::abs(s.fit.rate - s.reference_rate) / s.reference_rate)
                         : json(nullptr);
    json pts = json::array();
    for (const auto& p : s.fit.points)
        pts.push_back({{"n", p.n}, {"speed", p.speed}, {"p", p.p}, {"p_se", p.p_se}, {"y", num(p.y)}});
    j["points"] = pts;
    return j;
}

PowerLawModel build_model(const ExperimentConfig& cfg) { return PowerLawModel(cfg.model.alpha, cfg.model.spectral()); }

void run_ratio_window(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const auto regions = parse_regions(cfg.params.at("region"), cfg.model.dim);
    const double e = cfg.params.at("lambda_exponent").get<double>();
    const auto grid = parse_grid(cfg.params.at("n_grid"));
    Recorder rec{cfg.experiment, s, out};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto t0 = Clock::now();
        const auto lc = est_ratio_window(model, cfg.schedule, e, regions, grid[i], options(s, i));
        rec.add(lc, ms_since(t0), {{"lambda_n", std::pow(static_cast<double>(grid[i]), e)}});
    }
    if (out.rows.size() >= 2)
        out.summary["error_decreasing"] = out.rows.back().rel_error() < out.rows.front().rel_error();
    out.y_label = "P(S_n/λ_n ∈ A) / (n P(‖H‖>λ_n))";
}

void run_kth_order(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const int k = cfg.params.at("k").get<int>();
    const auto region = parse_region(cfg.params.at("region"), cfg.model.dim);
    const auto grid = parse_grid(cfg.params.at("n_grid"));
    const std::string which = cfg.params.value("method", "both");
    Recorder rec{cfg.experiment, s, out};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (int m = 0; m < 2; ++m) {
            if ((m == 0 && which == "ktagged") || (m == 1 && which == "plain")) continue;
            const auto t0 = Clock::now();
            const auto lc = est_kth_order(model, cfg.schedule, k, region, grid[i], options(s, 2 * i + m),
                                          m == 0 ? KthMethod::Plain : KthMethod::KTagged);
            rec.add(lc, ms_since(t0), {{"k", k}, {"nP", exceedance_mass(model, cfg.schedule, static_cast<double>(grid[i]))}});
        }
    }
    out.summary["region"] = region_json(region);
    out.y_label = "P(S_n/M_n ∈ A) / (nP(‖H‖>M_n))^k";
}

void run_boundary(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const int k = cfg.params.at("k").get<int>();
    const auto cap = parse_region(cfg.params.at("cap"), cfg.model.dim);
    const auto grid = parse_grid(cfg.params.at("n_grid"));
    StableLimit stable;
    stable.parallel = s.parallel;
    stable.seed = split_seed(s.seed, 1'000'003);
    if (cfg.params.contains("stable")) {
        const auto& st = cfg.params.at("stable");
        if (st.value("mode", "analytic") == "monte_carlo") stable.mode = StableMode::MonteCarlo;
        stable.n_approx = st.value("n_approx", stable.n_approx);
        stable.samples = st.value("samples", stable.samples);
    }
    Recorder rec{cfg.experiment, s, out};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto t0 = Clock::now();
        const auto lc = est_boundary(model, cfg.schedule, k, cap, grid[i], options(s, i), stable);
        rec.add(lc, ms_since(t0), {{"k", k}});
    }
    out.y_label = "P(‖S_n‖>kM_n, direction ∈ cap) / (nP)^k";
}

void run_slope_common(const std::string& experiment, const SlopeResult& r, const std::string& label,
                      const RunSettings& s, Outcome& out, double wall_ms) {
    Recorder rec{experiment, s, out};
    const double per = r.ladder.empty() ? 0.0 : wall_ms / static_cast<double>(r.ladder.size());
    for (const auto& lc : r.ladder) rec.add(lc, per);
    out.summary["fits"][label] = fit_json(r);
    if (!r.failure.empty()) out.failure += (out.failure.empty() ? "" : "; ") + label + ": " + r.failure;
}

void run_ldp_slope(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const Vector x = parse_vector(cfg.params.at("x"));
    const auto grid = parse_grid(cfg.params.at("n_grid"));
    const std::string which = cfg.params.value("sampler", "plain");
    for (int m = 0; m < 2; ++m) {
        if ((m == 0 && which == "tilted") || (m == 1 && which == "plain")) continue;
        const auto t0 = Clock::now();
        const auto r = est_ldp_slope(model, cfg.schedule, x, grid, options(s, static_cast<std::uint64_t>(m)),
                                     m == 0 ? LdpSampler::Plain : LdpSampler::Tilted);
        run_slope_common(cfg.experiment, r, m == 0 ? "plain" : "tilted", s, out, ms_since(t0));
    }
    out.y_label = "-log p_n / (nP(‖H‖>M_n))";
    out.rate_grid = render_rate_grid(RateFunction::for_model(model), x);
}

void run_moderate(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const double kappa = cfg.params.at("kappa").get<double>();
    const Vector x = parse_vector(cfg.params.at("x"));
    const auto grid = parse_grid(cfg.params.at("n_grid"));
    const auto t0 = Clock::now();
    const auto r = est_moderate(model, cfg.schedule, kappa, x, grid, options(s, 0));
    run_slope_common(cfg.experiment, r, "plain", s, out, ms_since(t0));
    const auto w = speed_window(model, cfg.schedule);
    out.summary["speed_window"] = {{"lo", w.lo}, {"hi", w.hi}, {"right_open_asymptotic", w.right_open_asymptotic}};
    out.y_label = "-log p_n / β_n";
    out.rate_grid = render_rate_grid(RateFunction::quadratic(d_matrix(model)), x);
}

void run_limits_table(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    // Limit measures are defined for any (alpha, sigma), so the model's standing
    // assumptions are not enforced here.
    const TailShape shape(cfg.model.alpha, cfg.model.spectral());
    const int k = cfg.params.at("k").get<int>();
    const auto regions = parse_regions(cfg.params.at("regions"), cfg.model.dim);
    const std::string which = cfg.params.value("method", "exact");
    const bool exact_ok = k == 1 || (cfg.model.dim == 1 && k <= 3);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& reg = regions[i];
        double exact = kNaN;
        json entry = {{"region", region_json(reg)}, {"k", k}};
        if (exact_ok) {
            const auto t0 = Clock::now();
            exact = nu_k_eval(NuK(shape, k, NuKMethod::ExactQuadrature), reg).value;
            if (which != "monte_carlo") {
                ResultRow row{static_cast<double>(k), exact, 0.0, exact, exact, exact, "exact_quadrature",
                              s.timing ? ms_since(t0) : 0.0};
                out.rows.push_back(row);
                entry["exact"] = exact;
            }
        } else if (which == "exact") {
            throw_invalid("exact quadrature covers d = 1 and k <= 3; use method monte_carlo");
        }
        if (which != "exact") {
            const auto t0 = Clock::now();
            NuK mc(shape, k, NuKMethod::WeightedMonteCarlo);
            mc.samples = cfg.params.value("samples", std::size_t{1'000'000});
            mc.seed = split_seed(s.seed, i);
            mc.parallel = s.parallel;
            const auto e = nu_k_eval(mc, reg);
            const double se = e.std_error.value_or(0.0);
            ResultRow row{static_cast<double>(k), e.value, se, e.value - kZ95 * se, e.value + kZ95 * se, exact,
                          "weighted_monte_carlo", s.timing ? ms_since(t0) : 0.0};
            out.rows.push_back(row);
            entry["monte_carlo"] = {{"value", e.value}, {"std_error", se}};
        }
        if (k == 1) entry["nu_closed_form"] = nu_eval(shape, reg);
        out.summary["records"].push_back(entry);
    }
    out.y_label = "ν^(k)(A)";
}

void run_regime_report(const ExperimentConfig& cfg, const RunSettings& s, Outcome& out) {
    const auto model = build_model(cfg);
    const auto r = classify_regime(model, cfg.schedule);
    out.summary.update(regime_json(model, cfg.schedule));
    if (r.kind == RegimeKind::Hard && model.alpha() != 2.0) {
        const auto w = speed_window(model, cfg.schedule);
        out.summary["speed_window"] = {{"lo", w.lo}, {"hi", w.hi}, {"right_open_asymptotic", w.right_open_asymptotic}};
        if (cfg.params.contains("kappa")) out.summary["kappa_admissible"] = w.contains(cfg.params.at("kappa").get<double>());
    }
    std::vector<std::size_t> grid{10, 100, 1000, 10000, 100000};
    if (cfg.params.contains("n_grid")) grid = parse_grid(cfg.params.at("n_grid"));
    const double lim = r.kind == RegimeKind::Soft ? 0.0
                       : r.kind == RegimeKind::Hard ? std::numeric_limits<double>::infinity()
                                                    : std::pow(cfg.schedule.coeff, -model.alpha());
    for (double n : grid) {
        const double np = exceedance_mass(model, cfg.schedule, n);
        ResultRow row{n, np, 0.0, np, np, lim, "closed_form", 0.0};
        out.rows.push_back(row);
        out.summary["records"].push_back(
            {{"n", n}, {"M_n", cfg.schedule.threshold(n)}, {"nP", np}, {"a_n", norming_a(model, n)},
             {"b_n", norming_b(model, cfg.schedule, n)}});
    }
    (void)s;
    out.y_label = "nP(‖H‖>M_n)";
}

std::string regime_needed(const std::string& exp) {
    if (exp == "ratio_window" || exp == "kth_order" || exp == "boundary") return "soft";
    if (exp == "ldp_slope" || exp == "moderate") return "hard";
    return "";
}

}  // namespace

std::string theorem_key(const std::string& experiment, const json& params) {
    if (experiment == "ratio_window") return "soft_truncation_window";
    if (experiment == "kth_order") return "kth_order_large_deviations";
    if (experiment == "boundary") return params.value("k", 1) == 1 ? "boundary_case_k1" : "boundary_case_k_ge_2";
    if (experiment == "ldp_slope") return "hard_truncation_ldp";
    if (experiment == "moderate") return "moderate_deviations";
    if (experiment == "limits_table") return "nu_k_limit_measures";
    if (experiment == "regime_report") return "regime_classification";
    return "unknown";
}

Outcome run_experiment(const ExperimentConfig& cfg, const RunSettings& settings) {
    Outcome out;
    out.summary["experiment"] = cfg.experiment;
    out.summary["theorem"] = theorem_key(cfg.experiment, cfg.params);
    out.summary["records"] = json::array();
    const auto& e = cfg.experiment;
    if (e == "ratio_window") run_ratio_window(cfg, settings, out);
    else if (e == "kth_order") run_kth_order(cfg, settings, out);
    else if (e == "boundary") run_boundary(cfg, settings, out);
    else if (e == "ldp_slope") run_ldp_slope(cfg, settings, out);
    else if (e == "moderate") run_moderate(cfg, settings, out);
    else if (e == "limits_table") run_limits_table(cfg, settings, out);
    else if (e == "regime_report") run_regime_report(cfg, settings, out);
    else throw_invalid("unknown experiment '" + e + "'");
    if (e != "regime_report" && e != "limits_table") {
        const auto model = build_model(cfg);
        out.summary["regime_info"] = regime_json(model, cfg.schedule);
    }
    if (!out.failure.empty()) out.summary["failure"] = out.failure;
    return out;
}

std::vector<Check> validation_checks(const json& doc) {
    std::vector<Check> checks;
    const auto problems = schema_problems(doc);
    if (!problems.empty()) {
        for (const auto& p : problems) checks.push_back({false, "schema", p});
        return checks;
    }
    checks.push_back({true, "schema", "all keys valid"});
    const auto cfg = parse_config(doc);
    const std::string& exp = cfg.experiment;
    const double a = cfg.model.alpha;

    SpectralMeasure spectral = cfg.model.spectral();
    const bool limits_only = exp == "limits_table";
    {
        const bool sym_needed = a == 1.0;
        const bool ok = !sym_needed || spectral.is_symmetric();
        checks.push_back({ok || limits_only, "model symmetry",
                          sym_needed ? (ok ? "α=1 and the spectral measure is symmetric"
                                           : std::string("α=1 requires symmetric distribution") +
                                                 (limits_only ? " (not needed for limits_table)" : ""))
                                     : "not required (α≠1)"});
    }
    {
        const bool needed = a > 1.0;
        const bool ok = !needed || spectral.mean_direction().norm() <= 1e-12;
        checks.push_back({ok || limits_only, "model zero mean",
                          needed ? (ok ? "α>1 and Σ w s = 0" : std::string("α>1 requires E(H)=0")) : "not required (α≤1)"});
    }
    if (!PowerLawModel::check_assumptions(a, spectral).empty()) {
        if (!limits_only) return checks;
    }
    if (limits_only) {
        const int k = cfg.params.at("k").get<int>();
        const TailShape shape(a, spectral);
        for (const auto& reg : parse_regions(cfg.params.at("regions"), cfg.model.dim)) {
            std::ostringstream name;
            name << "region r_lo=" << reg.r_lo;
            try {
                if (!(reg.r_lo > k - 1)) throw InvalidArgument("r_lo must exceed k-1 for ν^(k) to be finite");
                check_nu_k_continuity(shape, k, reg);
                checks.push_back({true, name.str(), "ν^(k)-continuity set with r_lo > k-1"});
            } catch (const std::exception& ex) {
                checks.push_back({false, name.str(), ex.what()});
            }
        }
        return checks;
    }

    const PowerLawModel model(a, spectral);
    const auto regime = classify_regime(model, cfg.schedule);
    const std::string need = regime_needed(exp);
    {
        std::ostringstream d;
        d << to_string(regime.kind) << " (nP(‖H‖>M_n) = c^-α n^" << regime.exceedance_exponent << ")";
        bool ok = true;
        if (regime.kind == RegimeKind::Intermediate && !need.empty()) {
            ok = false;
            d << "; intermediate regime (ρ=1/α) is unsupported: its large deviations are an open problem";
        } else if (need == "soft" && regime.kind != RegimeKind::Soft) {
            ok = false;
            d << "; soft regime requires lim nP(‖H‖>M_n)=0";
        } else if (need == "hard" && regime.kind != RegimeKind::Hard) {
            ok = false;
            d << "; hard regime requires lim nP(‖H‖>M_n)=∞";
        }
        checks.push_back({ok, "regime", d.str()});
    }
    if (regime.kind == RegimeKind::Soft && (exp == "ratio_window" || exp == "regime_report")) {
        checks.push_back({regime.side_conditions_ok || exp == "regime_report", "soft side conditions",
                          regime.side_conditions_ok ? "hold"
                          : a == 2.0               ? "α=2 needs M_n/√(n^{1+γ})→∞ (ρ > 1/2)"
                                                   : "α>2 needs M_n/√(n log n)→∞ (ρ > 1/2)"});
    }
    if (exp == "ratio_window") {
        const auto why = check_lambda_window(model, cfg.schedule, cfg.params.at("lambda_exponent").get<double>());
        checks.push_back({why.empty(), "λ_n window", why.empty() ? "b_n ≪ λ_n ≪ M_n" : why});
    }
    if (exp == "kth_order" || exp == "boundary") {
        const int k = cfg.params.at("k").get<int>();
        const bool ok = cfg.schedule.light_tail.satisfies_order_condition(k, a);
        checks.push_back({ok, "overshoot condition",
                          "P(L>x)=o(P(‖H‖>x)^{k-1}) for k=" + std::to_string(k) + " (" + cfg.schedule.light_tail.kind() +
                              " law has an exponential tail)"});
    }
    if (exp == "kth_order") {
        const int k = cfg.params.at("k").get<int>();
        const auto reg = parse_region(cfg.params.at("region"), cfg.model.dim);
        try {
            if (!(reg.r_lo > k - 1 && reg.r_lo < k)) throw InvalidArgument("r_lo must lie in (k-1, k)");
            check_nu_k_continuity(model.shape(), k, reg);
            checks.push_back({true, "region", "ν^(k)-continuity set with r_lo in (k-1, k)"});
        } catch (const std::exception& ex) {
            checks.push_back({false, "region", ex.what()});
        }
    }
    if (exp == "ldp_slope") {
        if (a == 2.0) {
            checks.push_back({false, "tail index",
                              "α=2 with exact Pareto has E‖H‖²=∞, but the hard-regime results at α=2 assume E‖H‖²<∞"});
        } else if (a > 2.0) {
            checks.push_back({false, "tail index", "the hard-regime Λ covers α<2; for α>2 use the moderate experiment"});
        } else {
            checks.push_back({true, "tail index", "α<2"});
        }
        const std::string sampler = cfg.params.value("sampler", "plain");
        if (sampler != "plain") {
            const bool ok = cfg.model.dim == 1 && cfg.model.isotropic_weight == 0.0 && cfg.schedule.light_tail.is_zero();
            checks.push_back({ok, "tilted sampler", ok ? "d=1, atom-only σ, L=0" : "needs d=1, an atom-only σ and L=0"});
        }
    }
    if (exp == "moderate" || (exp == "regime_report" && cfg.params.contains("kappa"))) {
        if (a == 2.0) {
            checks.push_back({false, "c_n window",
                              "α=2 with exact Pareto has E‖H‖²=∞, but the hard-regime results at α=2 assume E‖H‖²<∞"});
        } else if (regime.kind == RegimeKind::Hard) {
            const auto w = speed_window(model, cfg.schedule);
            const double kappa = cfg.params.at("kappa").get<double>();
            std::ostringstream d;
            d << "κ=" << kappa << (w.contains(kappa) ? " inside" : " outside") << " window (" << w.lo << ", " << w.hi << ")"
              << (w.right_open_asymptotic ? " [right end asymptotic]" : "");
            checks.push_back({w.contains(kappa), "c_n window", d.str()});
        }
    }
    return checks;
}

}  // namespace truncld::app
