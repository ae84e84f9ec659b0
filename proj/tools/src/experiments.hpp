#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <truncld/parallel.hpp>

#include "config.hpp"
#include "report.hpp"

namespace truncld::app {

struct RunSettings {
    std::uint64_t seed = 1;
    std::size_t reps = 10'000;
    ParallelConfig parallel{};
    bool timing = false;
};

struct Outcome {
    std::vector<ResultRow> rows;
    json summary = json::object();
    std::string y_label = "estimate";
    /// rate_grid.csv contents; empty when the experiment has no rate function.
    std::string rate_grid;
    /// Set when the experiment ran but could not produce its main result.
    std::string failure;
};

/// Machine-readable name of the result an experiment probes.
std::string theorem_key(const std::string& experiment, const json& params);

/// Throws AssumptionViolation (exit 2) when a hypothesis fails, other exceptions otherwise.
Outcome run_experiment(const ExperimentConfig& cfg, const RunSettings& settings);

struct Check {
    bool pass = false;
    std::string name;
    std::string detail;
};

/// Every assumption check `validate` reports; never samples.
std::vector<Check> validation_checks(const json& doc);

}  // namespace truncld::app
