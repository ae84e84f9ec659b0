#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <truncld/model.hpp>
#include <truncld/region.hpp>

namespace truncld::app {

using nlohmann::json;

/// Raised when a config fails schema validation; carries every violation.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"ratio_window", "kth_order",    "boundary",     "ldp_slope",
                                                "moderate",     "limits_table", "regime_report"};
    return names;
}

struct ModelBlock {
    double alpha = 1.0;
    int dim = 1;
    std::vector<Atom> atoms;
    double isotropic_weight = 0.0;

    SpectralMeasure spectral() const { return SpectralMeasure(dim, atoms, isotropic_weight); }
};

struct ExperimentConfig {
    std::string experiment;
    ModelBlock model;
    TruncationSchedule schedule{1.0, 1.0};
    json params = json::object();
    std::uint64_t seed = 1;
    std::size_t reps = 10'000;
    std::size_t chunk_size = 256;
    std::string output_dir = "out";
};

/// Every schema violation in a parsed document, as "key: problem" strings.
std::vector<std::string> schema_problems(const json& doc);

/// Validates then converts; throws SchemaError listing all violations.
ExperimentConfig parse_config(const json& doc);

/// Reads and parses a JSON file; throws std::runtime_error on I/O or syntax errors.
json load_json(const std::string& path);

RadialCapRegion parse_region(const json& j, int dim);
RegionUnion parse_regions(const json& j, int dim);
Vector parse_vector(const json& j);
std::vector<std::size_t> parse_grid(const json& j);

}  // namespace truncld::app
