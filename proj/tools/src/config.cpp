#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <truncld/error.hpp>

namespace truncld::app {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

class Checker {
public:
    std::vector<std::string> problems;

    void fail(const std::string& key, const std::string& what) { problems.push_back(key + ": " + what); }

    bool has(const json& obj, const std::string& key) const { return obj.is_object() && obj.contains(key); }

    // Returns true when the key exists and is a number satisfying pred.
    template <class Pred>
    bool number(const json& obj, const std::string& path, const std::string& key, bool required, Pred pred,
                const std::string& need) {
        if (!has(obj, key)) {
            if (required) fail(path + key, "missing (" + need + ")");
            return false;
        }
        const auto& v = obj.at(key);
        if (!v.is_number() || !pred(v.get<double>())) {
            fail(path + key, "must be " + need);
            return false;
        }
        return true;
    }

    bool integer(const json& obj, const std::string& path, const std::string& key, bool required, long long min) {
        if (!has(obj, key)) {
            if (required) fail(path + key, "missing (integer >= " + std::to_string(min) + ")");
            return false;
        }
        const auto& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < min) {
            fail(path + key, "must be an integer >= " + std::to_string(min));
            return false;
        }
        return true;
    }

    void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
        if (!obj.is_object()) return;
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key())) fail(path + it.key(), "unknown key");
    }

    void vector(const json& obj, const std::string& path, const std::string& key, int dim) {
        if (!has(obj, key)) {
            fail(path + key, "missing (array of " + std::to_string(dim) + " numbers)");
            return;
        }
        const auto& v = obj.at(key);
        if (!v.is_array() || static_cast<int>(v.size()) != dim) {
            fail(path + key, "must be an array of " + std::to_string(dim) + " numbers");
            return;
        }
        for (const auto& e : v)
            if (!e.is_number()) {
                fail(path + key, "entries must be numbers");
                return;
            }
    }

    void grid(const json& obj, const std::string& path, const std::string& key, bool required) {
        if (!has(obj, key)) {
            if (required) fail(path + key, "missing (non-empty array of integers >= 1)");
            return;
        }
        const auto& v = obj.at(key);
        bool ok = v.is_array() && !v.empty();
        if (ok)
            for (const auto& e : v) ok = ok && e.is_number_integer() && e.get<long long>() >= 1;
        if (!ok) fail(path + key, "must be a non-empty array of integers >= 1");
    }

    void choice(const json& obj, const std::string& path, const std::string& key, const std::set<std::string>& options) {
        if (!has(obj, key)) return;
        const auto& v = obj.at(key);
        if (!v.is_string() || !options.count(v.get<std::string>())) {
            std::string opts;
            for (const auto& o : options) opts += (opts.empty() ? "" : "|") + o;
            fail(path + key, "must be one of " + opts);
        }
    }

    void region(const json& r, const std::string& path, int dim, bool radii) {
        if (!r.is_object()) {
            fail(path, "region must be an object {r_lo, r_hi, axis, half_angle}");
            return;
        }
        unknown_keys(r, path + ".", {"r_lo", "r_hi", "axis", "half_angle"});
        if (radii) {
            number(r, path + ".", "r_lo", true, [](double x) { return x >= 0.0; }, "a number >= 0");
            if (has(r, "r_hi")) {
                const auto& h = r.at("r_hi");
                const bool ok = (h.is_string() && h.get<std::string>() == "inf") ||
                                (h.is_number() && (!has(r, "r_lo") || !r.at("r_lo").is_number() ||
                                                   h.get<double>() > r.at("r_lo").get<double>()));
                if (!ok) fail(path + ".r_hi", "must be \"inf\" or a number > r_lo");
            }
        }
        if (has(r, "axis")) {
            vector(r, path + ".", "axis", dim);
            const auto& a = r.at("axis");
            if (a.is_array() && static_cast<int>(a.size()) == dim) {
                double nn = 0.0;
                for (const auto& e : a)
                    if (e.is_number()) nn += e.get<double>() * e.get<double>();
                if (std::abs(std::sqrt(nn) - 1.0) > 1e-12) fail(path + ".axis", "must be a unit vector");
            }
        }
        number(r, path + ".", "half_angle", false, [](double x) { return x > 0.0 && x <= std::numbers::pi + 1e-15; },
               "a number in (0, pi]");
    }

    void regions(const json& obj, const std::string& path, const std::string& key, int dim) {
        if (!has(obj, key)) {
            fail(path + key, "missing (region object or array of regions)");
            return;
        }
        const auto& v = obj.at(key);
        if (v.is_array()) {
            if (v.empty()) fail(path + key, "must not be empty");
            for (std::size_t i = 0; i < v.size(); ++i) region(v[i], path + key + "[" + std::to_string(i) + "]", dim, true);
        } else {
            region(v, path + key, dim, true);
        }
    }
};

void check_model(Checker& c, const json& doc, int& dim) {
    if (!c.has(doc, "model")) {
        c.fail("model", "missing (object with alpha, dim, atoms, isotropic_weight)");
        return;
    }
    const auto& m = doc.at("model");
    if (!m.is_object()) {
        c.fail("model", "must be an object");
        return;
    }
    c.unknown_keys(m, "model.", {"alpha", "dim", "atoms", "isotropic_weight"});
    c.number(m, "model.", "alpha", true, [](double a) { return a > 0.0 && std::isfinite(a); }, "a number > 0");
    if (c.integer(m, "model.", "dim", true, 1)) dim = m.at("dim").get<int>();
    double total = 0.0;
    if (c.number(m, "model.", "isotropic_weight", false, [](double w) { return w >= 0.0 && w <= 1.0; },
                 "a number in [0, 1]"))
        total += m.at("isotropic_weight").get<double>();
    if (c.has(m, "atoms")) {
        const auto& atoms = m.at("atoms");
        if (!atoms.is_array()) {
            c.fail("model.atoms", "must be an array of [direction..., weight]");
        } else {
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const std::string p = "model.atoms[" + std::to_string(i) + "]";
                const auto& a = atoms[i];
                if (!a.is_array() || static_cast<int>(a.size()) != dim + 1) {
                    c.fail(p, "must be [direction (" + std::to_string(dim) + " numbers), weight]");
                    continue;
                }
                double nn = 0.0;
                bool numeric = true;
                for (const auto& e : a) numeric = numeric && e.is_number();
                if (!numeric) {
                    c.fail(p, "entries must be numbers");
                    continue;
                }
                for (int j = 0; j < dim; ++j) nn += a[j].get<double>() * a[j].get<double>();
                if (std::abs(std::sqrt(nn) - 1.0) > 1e-12) c.fail(p, "direction must have unit norm (within 1e-12)");
                const double w = a[dim].get<double>();
                if (w < 0.0) c.fail(p, "weight must be >= 0");
                total += w;
            }
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "atom weights plus isotropic_weight must sum to 1 (got " << total << ")";
        c.fail("model.atoms", os.str());
    }
}

void check_schedule(Checker& c, const json& doc) {
    if (!c.has(doc, "schedule")) {
        c.fail("schedule", "missing (object with trunc_coeff, trunc_exponent, light_tail, gamma_md)");
        return;
    }
    const auto& s = doc.at("schedule");
    if (!s.is_object()) {
        c.fail("schedule", "must be an object");
        return;
    }
    c.unknown_keys(s, "schedule.", {"trunc_coeff", "trunc_exponent", "light_tail", "gamma_md"});
    auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
    c.number(s, "schedule.", "trunc_coeff", true, pos, "a number > 0");
    c.number(s, "schedule.", "trunc_exponent", true, pos, "a number > 0");
    c.number(s, "schedule.", "gamma_md", false, pos, "a number > 0");
    if (c.has(s, "light_tail")) {
        const auto& l = s.at("light_tail");
        if (!l.is_object()) {
            c.fail("schedule.light_tail", "must be an object {kind, param}");
        } else {
            c.unknown_keys(l, "schedule.light_tail.", {"kind", "param"});
            c.choice(l, "schedule.light_tail.", "kind", {"zero", "exponential", "uniform"});
            const std::string kind = l.contains("kind") && l.at("kind").is_string() ? l.at("kind").get<std::string>() : "zero";
            if (kind != "zero") c.number(l, "schedule.light_tail.", "param", true, pos, "a number > 0");
        }
    }
}

void check_params(Checker& c, const json& doc, const std::string& exp, int dim) {
    const bool needs = exp != "regime_report";
    if (!c.has(doc, "params")) {
        if (needs) c.fail("params", "missing (experiment-specific object)");
        return;
    }
    const auto& p = doc.at("params");
    if (!p.is_object()) {
        c.fail("params", "must be an object");
        return;
    }
    const std::string pre = "params.";
    if (exp == "ratio_window") {
        c.unknown_keys(p, pre, {"lambda_exponent", "region", "n_grid"});
        c.number(p, pre, "lambda_exponent", true, [](double x) { return x > 0.0; }, "a number > 0");
        c.regions(p, pre, "region", dim);
        c.grid(p, pre, "n_grid", true);
    } else if (exp == "kth_order") {
        c.unknown_keys(p, pre, {"k", "region", "n_grid", "method"});
        c.integer(p, pre, "k", true, 1);
        if (c.has(p, "region")) {
            c.region(p.at("region"), pre + "region", dim, true);
        } else {
            c.fail(pre + "region", "missing (region object)");
        }
        c.grid(p, pre, "n_grid", true);
        c.choice(p, pre, "method", {"plain", "ktagged", "both"});
    } else if (exp == "boundary") {
        c.unknown_keys(p, pre, {"k", "cap", "n_grid", "stable"});
        c.integer(p, pre, "k", true, 1);
        if (c.has(p, "cap")) {
            c.region(p.at("cap"), pre + "cap", dim, false);
        } else {
            c.fail(pre + "cap", "missing (object {axis, half_angle})");
        }
        c.grid(p, pre, "n_grid", true);
        if (c.has(p, "stable")) {
            const auto& s = p.at("stable");
            c.unknown_keys(s, pre + "stable.", {"mode", "n_approx", "samples"});
            c.choice(s, pre + "stable.", "mode", {"analytic", "monte_carlo"});
            c.integer(s, pre + "stable.", "n_approx", false, 1);
            c.integer(s, pre + "stable.", "samples", false, 1);
        }
    } else if (exp == "ldp_slope") {
        c.unknown_keys(p, pre, {"x", "n_grid", "sampler"});
        c.vector(p, pre, "x", dim);
        c.grid(p, pre, "n_grid", true);
        c.choice(p, pre, "sampler", {"plain", "tilted", "both"});
    } else if (exp == "moderate") {
        c.unknown_keys(p, pre, {"kappa", "x", "n_grid"});
        c.number(p, pre, "kappa", true, [](double x) { return x > 0.0; }, "a number > 0");
        c.vector(p, pre, "x", dim);
        c.grid(p, pre, "n_grid", true);
    } else if (exp == "limits_table") {
        c.unknown_keys(p, pre, {"k", "regions", "method", "samples"});
        c.integer(p, pre, "k", true, 1);
        c.regions(p, pre, "regions", dim);
        c.choice(p, pre, "method", {"exact", "monte_carlo", "both"});
        c.integer(p, pre, "samples", false, 1);
    } else if (exp == "regime_report") {
        c.unknown_keys(p, pre, {"n_grid", "kappa"});
        c.grid(p, pre, "n_grid", false);
        c.number(p, pre, "kappa", false, [](double x) { return x > 0.0; }, "a number > 0");
    }
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> problems)
    : std::runtime_error("invalid config:" + join(problems)), problems_(std::move(problems)) {}

std::vector<std::string> schema_problems(const json& doc) {
    Checker c;
    if (!doc.is_object()) {
        c.fail("<root>", "config must be a JSON object");
        return c.problems;
    }
    c.unknown_keys(doc, "", {"experiment", "model", "schedule", "params", "seed", "reps", "chunk_size", "output_dir"});
    std::string exp;
    if (!c.has(doc, "experiment")) {
        c.fail("experiment", "missing");
    } else if (!doc.at("experiment").is_string()) {
        c.fail("experiment", "must be a string");
    } else {
        exp = doc.at("experiment").get<std::string>();
        const auto& names = experiment_names();
        if (std::find(names.begin(), names.end(), exp) == names.end()) c.fail("experiment", "unknown experiment '" + exp + "'");
    }
    int dim = 1;
    check_model(c, doc, dim);
    check_schedule(c, doc);
    if (!exp.empty()) check_params(c, doc, exp, dim);
    if (c.has(doc, "seed") && !(doc.at("seed").is_number_unsigned() || (doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() >= 0)))
        c.fail("seed", "must be a non-negative integer");
    c.integer(doc, "", "reps", false, 1);
    c.integer(doc, "", "chunk_size", false, 1);
    if (c.has(doc, "output_dir") && !doc.at("output_dir").is_string()) c.fail("output_dir", "must be a string");
    return c.problems;
}

Vector parse_vector(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

std::vector<std::size_t> parse_grid(const json& j) {
    std::vector<std::size_t> g;
    for (const auto& e : j) g.push_back(e.get<std::size_t>());
    return g;
}

RadialCapRegion parse_region(const json& j, int dim) {
    const double lo = j.value("r_lo", 0.0);
    double hi = kInf;
    if (j.contains("r_hi") && j.at("r_hi").is_number()) hi = j.at("r_hi").get<double>();
    Vector axis = Vector::Zero(dim);
    axis(0) = 1.0;
    if (j.contains("axis")) axis = parse_vector(j.at("axis"));
    const double theta = j.value("half_angle", std::numbers::pi);
    return RadialCapRegion(lo, hi, axis, theta);
}

RegionUnion parse_regions(const json& j, int dim) {
    RegionUnion out;
    if (j.is_array()) {
        for (const auto& r : j) out.push_back(parse_region(r, dim));
    } else {
        out.push_back(parse_region(j, dim));
    }
    return out;
}

ExperimentConfig parse_config(const json& doc) {
    if (auto problems = schema_problems(doc); !problems.empty()) throw SchemaError(std::move(problems));
    ExperimentConfig cfg;
    cfg.experiment = doc.at("experiment").get<std::string>();
    const auto& m = doc.at("model");
    cfg.model.alpha = m.at("alpha").get<double>();
    cfg.model.dim = m.at("dim").get<int>();
    cfg.model.isotropic_weight = m.value("isotropic_weight", 0.0);
    if (m.contains("atoms"))
        for (const auto& a : m.at("atoms")) {
            Vector dir(cfg.model.dim);
            for (int i = 0; i < cfg.model.dim; ++i) dir(i) = a[static_cast<std::size_t>(i)].get<double>();
            cfg.model.atoms.push_back(Atom{dir, a[static_cast<std::size_t>(cfg.model.dim)].get<double>()});
        }
    const auto& s = doc.at("schedule");
    LightTailLaw lt;
    if (s.contains("light_tail")) {
        const auto& l = s.at("light_tail");
        const std::string kind = l.value("kind", "zero");
        if (kind == "exponential") lt = LightTailLaw::exponential(l.at("param").get<double>());
        if (kind == "uniform") lt = LightTailLaw::uniform(l.at("param").get<double>());
    }
    cfg.schedule = TruncationSchedule(s.at("trunc_coeff").get<double>(), s.at("trunc_exponent").get<double>(), lt,
                                      s.value("gamma_md", 0.5));
    cfg.params = doc.value("params", json::object());
    cfg.seed = doc.value("seed", std::uint64_t{1});
    cfg.reps = doc.value("reps", std::size_t{10'000});
    cfg.chunk_size = doc.value("chunk_size", std::size_t{256});
    cfg.output_dir = doc.value("output_dir", std::string("out"));
    return cfg;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config '" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace truncld::app
