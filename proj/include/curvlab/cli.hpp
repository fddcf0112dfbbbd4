#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace curvlab::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

enum class Format { json, csv };

struct ScheduleBlock {
    std::string kind = "harmonic";  // harmonic | linear | explicit
    int count = 0;
    std::vector<double> values;     // explicit only
};

struct FamilyBlock {
    std::string base;
    ScheduleBlock schedule;
    std::string condition = "anco_all";
    std::optional<double> lambda_upper;
    std::optional<int> count;
    std::vector<double> epsilon;
    std::optional<double> diameter_factor;
    int sample_points = 64;
};

// Every option has a resolved value after parsing; which ones a command
// accepts is checked by parse_config.
struct Options {
    int order = 32;
    int samples = 1000;
    std::uint64_t seed = 1;
    int threads = 0;
    int points = 8;
    std::vector<std::vector<double>> at;  // explicit chart points
    std::vector<int> p;                   // pw-check degrees; empty means all admissible
    std::optional<double> lambda;         // gauss-bonnet volume bound
    bool nonneg_check = false;
    bool allow_dim6 = false;
    std::vector<double> scales = {0.5, 2.0, 10.0};
    std::vector<double> expected;         // spectrum reference values
    int pairs = 10000;
    int max_dim = 12;
    std::optional<double> tolerance;  // per-command default when unset
};

struct RunConfig {
    std::string command;
    std::optional<std::string> manifold;  // catalog descriptor
    std::optional<FamilyBlock> family;
    Options options;
    std::optional<std::string> output;
    Format format = Format::json;
};

const std::vector<std::string>& commands();

// Strict: unknown keys, options the command does not use, and ill-typed values
// raise ConfigurationError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Resolved config with every default filled in; embedded in each report.
nlohmann::json to_json(const RunConfig& cfg);

double default_tolerance(const std::string& command);

struct RunResult {
    int exit_code = 0;
    nlohmann::json report;
};

// Executes the command. Library errors become a structured error report with
// exit code 2 (configuration, unsupported, domain) or 1 (numerical).
RunResult run(const RunConfig& cfg);
nlohmann::json error_report(const std::string& command, const std::string& kind, const std::string& message,
                            const nlohmann::json& config);

// Throws ValidationError naming the first offending field.
void validate_report(const nlohmann::json& report);

// Records flattened to CSV; arrays are joined with ';'.
std::string records_to_csv(const nlohmann::json& records);
// Sibling of a CSV output path that receives the summary JSON.
std::string summary_path(const std::string& csv_path);
// Writes the report in the configured format; stdout when no path is set.
void write_report(const RunResult& result, const RunConfig& cfg);

}  // namespace curvlab::cli
