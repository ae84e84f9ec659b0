#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace truncld::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssumption = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    std::optional<std::size_t> workers;
    bool timing = false;
};

/// Runs one config and writes results.csv, summary.json and convergence.svg.
int cmd_run(const std::string& config_path, const Overrides& ov, std::ostream& out, std::ostream& err);
/// Prints every assumption check; always returns 0.
int cmd_validate(const std::string& config_path, std::ostream& out);
int cmd_list(std::ostream& out);

/// Full command-line entry point (CLI11 parsing included).
int main_entry(int argc, char** argv);

}  // namespace truncld::app
