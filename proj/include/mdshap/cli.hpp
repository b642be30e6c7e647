#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdshap/batch.hpp"
#include "mdshap/cellwise.hpp"
#include "mdshap/simulation.hpp"

namespace mdshap::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

enum class Command { Explain, Detect, Simulate, Report };
enum class Estimate { Sample, Standardize };

struct RunConfig {
    Command command = Command::Explain;
    std::filesystem::path input;
    std::optional<std::filesystem::path> mu_path;
    std::optional<std::filesystem::path> sigma_path;
    std::optional<Estimate> estimate;
    std::optional<std::filesystem::path> cells_path;  // explain: externally flagged cells
    std::vector<std::string> log_columns;
    Algorithm algorithm = Algorithm::MOE;
    DetectOptions detect;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> csv_out;
    std::optional<std::filesystem::path> svg_dir;
    bool history = false;
    bool serial = false;
    std::size_t max_rows = 50;
    GridConfig grid;
};

/// Throws Error(InvalidArgument) on inconsistent settings, e.g. zero or two
/// model sources.
void validate(const RunConfig& config);

nlohmann::json cmd_explain(const RunConfig& config);
nlohmann::json cmd_detect(const RunConfig& config);
nlohmann::json cmd_simulate(const RunConfig& config);
/// Renders SVGs from a stored document; returns the list of written files.
nlohmann::json cmd_report(const RunConfig& config);

/// Parses arguments, runs the command and maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdshap::cli
