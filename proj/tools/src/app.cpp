#include "app.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include <truncld/error.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "report.hpp"

namespace truncld::app {

namespace {

std::size_t default_workers() {
    if (const char* env = std::getenv("WORKER_COUNT"); env && *env) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int cmd_run(const std::string& config_path, const Overrides& ov, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(load_json(config_path));
    } catch (const SchemaError& e) {
        err << "invalid config '" << config_path << "':\n";
        for (const auto& p : e.problems()) err << "  " << p << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    RunSettings settings;
    settings.seed = ov.seed.value_or(cfg.seed);
    settings.reps = ov.reps.value_or(cfg.reps);
    settings.parallel.workers = ov.workers.value_or(default_workers());
    settings.parallel.chunk_size = cfg.chunk_size;
    settings.timing = ov.timing;
    std::string dir = cfg.output_dir;
    if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) dir = env;
    if (ov.out) dir = *ov.out;

    Outcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        outcome = run_experiment(cfg, settings);
    } catch (const AssumptionViolation& e) {
        err << "assumption violated: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        std::filesystem::create_directories(dir);
        auto& s = outcome.summary;
        s["config"] = load_json(config_path);
        s["seed"] = settings.seed;
        s["reps"] = settings.reps;
        s["chunk_size"] = settings.parallel.chunk_size;
        s["wall_time_s"] = wall;
        write_text(dir + "/results.csv", render_csv(outcome.rows));
        write_text(dir + "/summary.json", s.dump(2) + "\n");
        if (!outcome.rate_grid.empty()) write_text(dir + "/rate_grid.csv", outcome.rate_grid);
        write_text(dir + "/convergence.svg",
                   render_svg(outcome.rows, cfg.experiment + " (" + s["theorem"].get<std::string>() + ")", outcome.y_label));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    out << "wrote " << outcome.rows.size() << " rows to " << dir << "/results.csv\n";
    if (!outcome.failure.empty()) {
        err << "estimation failed: " << outcome.failure << '\n';
        return kExitError;
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path, std::ostream& out) {
    std::vector<Check> checks;
    try {
        checks = validation_checks(load_json(config_path));
    } catch (const std::exception& e) {
        checks.push_back({false, "config", e.what()});
    }
    int failed = 0;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << '\n';
        failed += c.pass ? 0 : 1;
    }
    out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
    return kExitOk;
}

int cmd_list(std::ostream& out) {
    for (const auto& name : experiment_names()) out << name << "  ->  " << theorem_key(name, json::object()) << '\n';
    return kExitOk;
}

int main_entry(int argc, char** argv) {
    CLI::App cli{"truncld: large deviations of truncated heavy-tailed sums"};
    cli.require_subcommand(1);

    Overrides ov;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    std::string outdir;
    std::size_t workers = 0;

    auto* run = cli.add_subcommand("run", "run an experiment config");
    run->add_option("config", config, "experiment config (JSON)")->required();
    auto* o_seed = run->add_option("--seed", seed, "master seed (overrides the config)");
    auto* o_reps = run->add_option("--reps", reps, "replications per estimate")->check(CLI::PositiveNumber);
    auto* o_out = run->add_option("--out", outdir, "output directory (overrides OUTPUT_DIR and the config)");
    auto* o_workers = run->add_option("--workers", workers, "worker threads (default WORKER_COUNT or all cores)")
                          ->check(CLI::PositiveNumber);
    run->add_flag("--timing", ov.timing, "record wall_ms in results.csv (breaks byte-identical output)");

    auto* val = cli.add_subcommand("validate", "check a config's assumptions without sampling");
    val->add_option("config", config, "experiment config (JSON)")->required();

    cli.add_subcommand("list-experiments", "list experiment names and the result each probes");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? kExitOk : kExitError;
    }

    if (*run) {
        if (*o_seed) ov.seed = seed;
        if (*o_reps) ov.reps = reps;
        if (*o_out) ov.out = outdir;
        if (*o_workers) ov.workers = workers;
        return cmd_run(config, ov, std::cout, std::cerr);
    }
    if (*val) return cmd_validate(config, std::cout);
    return cmd_list(std::cout);
}

}  // namespace truncld::app
