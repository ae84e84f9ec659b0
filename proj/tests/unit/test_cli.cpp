#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "app.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using truncld::app::Overrides;

namespace {

const std::string kConfigs = TRUNCLD_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("truncld_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int run(const fs::path& config, const fs::path& out, std::string* err = nullptr, Overrides ov = {}) {
    ov.out = out.string();
    if (!ov.workers) ov.workers = 2;
    std::ostringstream o, e;
    const int code = truncld::app::cmd_run(config.string(), ov, o, e);
    if (err) *err = e.str();
    return code;
}

}  // namespace

TEST_CASE("regime_report writes the classification") {
    const auto dir = scratch("regime");
    REQUIRE(run(kConfigs + "/regime_report.json", dir) == truncld::app::kExitOk);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("regime") == "soft");
    CHECK(summary.at("side_conditions_ok") == true);
    CHECK(summary.at("theorem") == "regime_classification");
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "convergence.svg"));
}

TEST_CASE("intermediate regime exits with code 2") {
    const auto dir = scratch("intermediate");
    std::string err;
    CHECK(run(kConfigs + "/kth_order_intermediate.json", dir, &err) == truncld::app::kExitAssumption);
    CHECK(err.find("intermediate regime") != std::string::npos);
    CHECK(err.find("unsupported") != std::string::npos);
}

TEST_CASE("limits_table reproduces nu^(2)") {
    const auto dir = scratch("limits");
    auto cfg = nlohmann::json::parse(slurp(kConfigs + "/limits_table.json"));
    cfg["params"]["method"] = "exact";
    REQUIRE(run(write_config(dir, cfg), dir / "out") == 0);
    const auto csv = slurp(dir / "out" / "results.csv");
    CHECK(csv.rfind(truncld::app::kCsvHeader, 0) == 0);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    const double first = std::stod(line.substr(line.find(',') + 1));
    CHECK(first == doctest::Approx(1.6414).epsilon(1e-4));
    CHECK(first == doctest::Approx(1.6413987469).epsilon(1e-9));
}

TEST_CASE("schema errors list every bad key and exit 1") {
    const auto dir = scratch("schema");
    nlohmann::json cfg = {{"experiment", "ratio_window"},
                          {"model", {{"alpha", -1}, {"dim", 1}, {"atoms", {{1, 0.5}}}, {"colour", "red"}}},
                          {"schedule", {{"trunc_coeff", 1}}},
                          {"params", {{"lambda_exponent", 0.7}}}};
    std::string err;
    CHECK(run(write_config(dir, cfg), dir / "out", &err) == truncld::app::kExitError);
    for (const char* key : {"model.alpha", "model.colour", "model.atoms", "schedule.trunc_exponent", "params.region",
                            "params.n_grid"})
        CHECK_MESSAGE(err.find(key) != std::string::npos, key);
    const auto problems = truncld::app::schema_problems(cfg);
    CHECK(problems.size() >= 6);
}

TEST_CASE("asymmetric alpha = 1 fails validation but validate exits 0") {
    const auto dir = scratch("validate");
    auto cfg = nlohmann::json::parse(slurp(kConfigs + "/regime_report.json"));
    cfg["model"]["atoms"] = {{1, 0.7}, {-1, 0.3}};
    std::ostringstream out;
    CHECK(truncld::app::cmd_validate(write_config(dir, cfg).string(), out) == 0);
    CHECK(out.str().find("FAIL") != std::string::npos);
    CHECK(out.str().find("α=1 requires symmetric distribution") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("validate reports the speed window") {
    const auto dir = scratch("window");
    nlohmann::json cfg = {{"experiment", "moderate"},
                          {"model", {{"alpha", 0.5}, {"dim", 1}, {"atoms", {{1, 1.0}}}}},
                          {"schedule", {{"trunc_coeff", 1}, {"trunc_exponent", 0.5}}},
                          {"params", {{"kappa", 1.0}, {"x", {1.0}}, {"n_grid", {10, 100, 1000}}}}};
    std::ostringstream out;
    truncld::app::cmd_validate(write_config(dir, cfg).string(), out);
    CHECK(out.str().find("PASS  c_n window") != std::string::npos);
    CHECK(out.str().find("(0.875, 1.25)") != std::string::npos);

    cfg["experiment"] = "ldp_slope";
    cfg["model"] = {{"alpha", 2.0}, {"dim", 1}, {"atoms", {{1, 0.5}, {-1, 0.5}}}};
    cfg["schedule"]["trunc_exponent"] = 0.3;
    cfg["params"] = {{"x", {1.0}}, {"n_grid", {10, 100, 1000}}};
    std::ostringstream out2;
    truncld::app::cmd_validate(write_config(dir, cfg).string(), out2);
    CHECK(out2.str().find("FAIL") != std::string::npos);
    CHECK(out2.str().find("E‖H‖²") != std::string::npos);
}

TEST_CASE("results.csv is byte-identical across worker counts") {
    const auto dir = scratch("determinism");
    auto cfg = nlohmann::json::parse(slurp(kConfigs + "/boundary.json"));
    cfg["reps"] = 20000;
    const auto path = write_config(dir, cfg);
    std::string csv[3];
    const std::size_t workers[3] = {1, 2, 8};
    for (int i = 0; i < 3; ++i) {
        Overrides ov;
        ov.workers = workers[i];
        REQUIRE(run(path, dir / ("w" + std::to_string(workers[i])), nullptr, ov) == 0);
        csv[i] = slurp(dir / ("w" + std::to_string(workers[i])) / "results.csv");
    }
    CHECK(csv[0] == csv[1]);
    CHECK(csv[0] == csv[2]);
    Overrides ov;
    ov.seed = 12345;
    REQUIRE(run(path, dir / "other", nullptr, ov) == 0);
    CHECK(slurp(dir / "other" / "results.csv") != csv[0]);
}

TEST_CASE("every experiment names its theorem") {
    for (const auto& name : truncld::app::experiment_names())
        CHECK(truncld::app::theorem_key(name, nlohmann::json::object()) != "unknown");
}

TEST_CASE("csv formatting") {
    CHECK(truncld::app::format_double(0.1) == "0.10000000000000001");
    truncld::app::ResultRow row{10, 1.1, 0.1, 0.9, 1.3, 1.0, "plain", 0};
    CHECK(row.rel_error() == doctest::Approx(0.1));
}

TEST_CASE("moderate run exports a rate grid") {
    const auto dir = scratch("rate_grid");
    auto cfg = nlohmann::json::parse(slurp(kConfigs + "/moderate.json"));
    cfg["reps"] = 4000;
    cfg["params"]["x"] = {0.5};
    REQUIRE(run(write_config(dir, cfg), dir / "out") == 0);
    std::istringstream in(slurp(dir / "out" / "rate_grid.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "s,lambda_norm,Lambda,x_norm,Lambda_star");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    REQUIRE(rows.size() == 41);
    // Quadratic rate: both columns scale like s^2, and Lambda = Lambda* at s = 1.
    CHECK(rows[0][4] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rows[40][4] == doctest::Approx(4.0 * rows[20][4]).epsilon(1e-8));
    CHECK(rows[40][2] == doctest::Approx(4.0 * rows[20][2]).epsilon(1e-8));
    CHECK(rows[20][2] == doctest::Approx(rows[20][4]).epsilon(1e-8));
}
