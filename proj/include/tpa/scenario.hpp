#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tpa/tpa_engine.hpp"

namespace tpa {

enum class SweepVariable { Detuning, Bandwidth };
enum class OutputFormat { Csv, Json };

struct SweepSpec {
    SweepVariable variable = SweepVariable::Detuning;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 2;
    std::string unit;  // "nm" or "rad_s"
};

// Fully validated run description resolved from the raw key-value map.
struct ScenarioConfig {
    FiberSpec fiber;
    AtomicLadder atom;
    PhotonPairSpec pair;
    VaporSpec vapor;
    std::optional<ToroidSpec> toroid;
    std::optional<SweepSpec> sweep;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;
    double lambda_m = 0.0;
    double core_index_value = 0.0;
    std::map<std::string, std::string> raw;
};

struct SweepRow {
    std::optional<double> x_value;
    std::string x_unit;
    double rate_per_s = 0.0;
    std::optional<double> enhancement_factor;
    std::optional<double> separation_s_m;
};

struct SweepResult {
    std::string variable;
    std::string unit;
    std::vector<SweepRow> rows;
};

struct BandwidthOptimum {
    double sigma_star_rad_s = 0.0;
    double rate_star = 0.0;
};

// Parse flat `key = value` text with '#' comments; later duplicates win.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Raw parameter map of a named built-in scenario.
std::map<std::string, std::string> builtin_scenario(const std::string& name);

// Validate the raw map, apply unit conversions, and build engine inputs.
ScenarioConfig resolve_config(const std::map<std::string, std::string>& raw);

// Single rate evaluation dispatched on pair kind and toroid presence.
TpaReport run_scenario(const ScenarioConfig& config);

// Evaluate the configured sweep; points may run on up to `jobs` threads.
SweepResult run_sweep(const ScenarioConfig& config, int jobs);

// Locate the bandwidth that maximizes the entangled rate at fixed detuning.
BandwidthOptimum optimize_bandwidth(const ScenarioConfig& config);

// Strict interior local-maximum count of a sampled curve.
int count_interior_maxima(const std::vector<double>& values);

// Stable 64-bit hash of the raw parameter map, as 16 hex digits.
std::string config_hash_hex(const std::map<std::string, std::string>& raw);

std::string render_csv(const std::map<std::string, std::string>& parameters,
                       const std::vector<SweepRow>& rows);
std::string render_json(const std::map<std::string, std::string>& parameters,
                        const TpaReport& report);
std::string render_json(const std::map<std::string, std::string>& parameters,
                        const SweepResult& sweep);
std::string render_json_rows(
    const std::map<std::string, std::string>& parameters,
    const std::string& label, const std::vector<SweepRow>& rows);

// Write to the path, or to stdout when the path is empty.
void write_output(const std::string& path, const std::string& content);

// Read a whole file into a string.
std::string read_text_file(const std::string& path);

}  // namespace tpa
