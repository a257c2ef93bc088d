#include <cctype>
#include <cmath>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"
#include "tpa/fiber_modes.hpp"
#include "tpa/scenario.hpp"
#include "tpa/tpa_engine.hpp"

namespace {

struct CommonOptions {
    std::string scenario;
    std::string config_path;
    std::vector<std::string> sets;
    std::string output;
    std::string format;
    int jobs = 1;
};

std::string trim_copy(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
        --end;
    }
    return text.substr(begin, end - begin);
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_sources,
                bool with_jobs) {
    if (with_sources) {
        cmd->add_option("--scenario", opts.scenario,
                        "Built-in scenario name (table1-entangled-fiber, "
                        "table1-mono-fiber, table1-toroid)");
        cmd->add_option("--config", opts.config_path,
                        "Path to a key = value configuration file");
    }
    cmd->add_option("--set", opts.sets,
                    "Override one configuration key, KEY=VALUE (repeatable)");
    cmd->add_option("--output", opts.output,
                    "Output file path (default: stdout)");
    cmd->add_option("--format", opts.format, "Output format: csv or json");
    if (with_jobs) {
        cmd->add_option("--jobs", opts.jobs,
                        "Maximum worker threads for sweep points");
    }
}

void apply_sets(std::map<std::string, std::string>& raw,
                const std::vector<std::string>& sets) {
    for (const std::string& assignment : sets) {
        const std::size_t eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw tpa::ConfigError("--set expects KEY=VALUE, got '" +
                                   assignment + "'");
        }
        const std::string key = trim_copy(assignment.substr(0, eq));
        const std::string value = trim_copy(assignment.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw tpa::ConfigError("--set expects KEY=VALUE, got '" +
                                   assignment + "'");
        }
        raw[key] = value;
    }
}

std::map<std::string, std::string> build_raw(const CommonOptions& opts) {
    std::map<std::string, std::string> raw;
    if (!opts.scenario.empty()) {
        raw = tpa::builtin_scenario(opts.scenario);
    }
    if (!opts.config_path.empty()) {
        const auto from_file =
            tpa::parse_config_text(tpa::read_text_file(opts.config_path));
        for (const auto& [key, value] : from_file) {
            raw[key] = value;
        }
    }
    apply_sets(raw, opts.sets);
    if (!opts.format.empty()) {
        raw["output.format"] = opts.format;
    }
    if (!opts.output.empty()) {
        raw["output.path"] = opts.output;
    }
    if (raw.empty()) {
        throw tpa::ConfigError(
            "no configuration given; use --scenario, --config, or --set");
    }
    return raw;
}

void emit_rows(const tpa::ScenarioConfig& config,
               const std::map<std::string, std::string>& raw,
               const std::string& label,
               const std::vector<tpa::SweepRow>& rows) {
    const std::string text = config.format == tpa::OutputFormat::Json
                                 ? tpa::render_json_rows(raw, label, rows)
                                 : tpa::render_csv(raw, rows);
    tpa::write_output(config.output_path, text);
}

void run_rate(const CommonOptions& opts) {
    const auto raw = build_raw(opts);
    const tpa::ScenarioConfig config = tpa::resolve_config(raw);
    const tpa::TpaReport report = tpa::run_scenario(config);
    if (config.format == tpa::OutputFormat::Json) {
        tpa::write_output(config.output_path, tpa::render_json(raw, report));
        return;
    }
    tpa::SweepRow row;
    row.rate_per_s = report.rate_R2;
    row.enhancement_factor = report.enhancement_factor;
    row.separation_s_m = report.separation_s;
    tpa::write_output(config.output_path, tpa::render_csv(raw, {row}));
}

void run_sweep_command(const CommonOptions& opts) {
    const auto raw = build_raw(opts);
    const tpa::ScenarioConfig config = tpa::resolve_config(raw);
    const tpa::SweepResult result = tpa::run_sweep(config, opts.jobs);
    const std::string text = config.format == tpa::OutputFormat::Json
                                 ? tpa::render_json(raw, result)
                                 : tpa::render_csv(raw, result.rows);
    tpa::write_output(config.output_path, text);
}

void run_optimize(const CommonOptions& opts) {
    const auto raw = build_raw(opts);
    const tpa::ScenarioConfig config = tpa::resolve_config(raw);
    const tpa::BandwidthOptimum optimum = tpa::optimize_bandwidth(config);
    tpa::SweepRow row;
    row.x_value = optimum.sigma_star_rad_s;
    row.x_unit = "rad_s";
    row.rate_per_s = optimum.rate_star;
    emit_rows(config, raw, "optimum_bandwidth", {row});
}

void run_table1(const CommonOptions& opts) {
    static const char* kNames[] = {"table1-entangled-fiber",
                                   "table1-mono-fiber", "table1-toroid"};
    std::map<std::string, std::string> combined;
    std::vector<tpa::SweepRow> rows;
    tpa::ScenarioConfig last_config;
    for (std::size_t i = 0; i < 3; ++i) {
        auto raw = tpa::builtin_scenario(kNames[i]);
        apply_sets(raw, opts.sets);
        if (!opts.format.empty()) {
            raw["output.format"] = opts.format;
        }
        if (!opts.output.empty()) {
            raw["output.path"] = opts.output;
        }
        const tpa::ScenarioConfig config = tpa::resolve_config(raw);
        const tpa::TpaReport report = tpa::run_scenario(config);
        tpa::SweepRow row;
        row.x_value = static_cast<double>(i + 1);
        row.x_unit = "table1_row";
        row.rate_per_s = report.rate_R2;
        row.enhancement_factor = report.enhancement_factor;
        row.separation_s_m = report.separation_s;
        rows.push_back(row);
        for (const auto& [key, value] : raw) {
            combined[std::string(kNames[i]) + "." + key] = value;
        }
        last_config = config;
    }
    emit_rows(last_config, combined, "table1", rows);
}

void run_coincidence(const CommonOptions& opts) {
    const auto raw = build_raw(opts);
    const tpa::ScenarioConfig config = tpa::resolve_config(raw);
    if (config.pair.kind != tpa::PairKind::Entangled) {
        throw tpa::ConfigError(
            "coincidence profile requires pair.kind = entangled");
    }
    const tpa::GuidedMode mode =
        tpa::normalize_mode(config.fiber, config.pair.omega_s0);
    const double u = mode.group_velocity_u;
    const double separation = tpa::pair_separation(u, config.pair.sigma);

    std::vector<tpa::SweepRow> rows;
    for (int k = 0; k <= 100; ++k) {
        const double z = 5.0 * separation * static_cast<double>(k) / 100.0;
        tpa::SweepRow row;
        row.x_value = z;
        row.x_unit = "m";
        row.rate_per_s = tpa::coincidence_profile(z, u, config.pair.sigma);
        row.separation_s_m = separation;
        rows.push_back(row);
    }
    emit_rows(config, raw, "coincidence_profile", rows);
}

void run_mode(const CommonOptions& opts) {
    const auto raw = build_raw(opts);
    const tpa::ScenarioConfig config = tpa::resolve_config(raw);
    const tpa::GuidedMode mode =
        tpa::normalize_mode(config.fiber, config.pair.omega_s0);
    const double a = config.fiber.core_radius();
    const double v_parameter =
        (tpa::constants::pi * config.fiber.diameter_D / config.lambda_m) *
        std::sqrt(config.core_index_value * config.core_index_value - 1.0);

    nlohmann::json doc;
    doc["config_hash"] = tpa::config_hash_hex(raw);
    doc["parameters"] = raw;
    doc["results"]["mode"] = {
        {"omega_rad_s", mode.omega},
        {"beta_rad_m", mode.beta},
        {"n_eff", mode.beta * tpa::constants::c0 / mode.omega},
        {"group_velocity_m_s", mode.group_velocity_u},
        {"norm_factor_V_m", mode.norm_factor_Nbeta},
        {"surface_field_V_m", mode.field_profile(a, 0.0).magnitude()},
        {"energy_fraction_outside", mode.energy_fraction_outside},
        {"V_parameter", v_parameter},
        {"single_mode",
         tpa::single_mode_check(config.fiber, config.pair.omega_s0)},
        {"core_radius_m", a},
    };
    tpa::write_output(config.output_path, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Two-photon absorption rates for photon pairs coupled to a vapor "
        "through the evanescent field of a sub-wavelength fiber"};
    app.require_subcommand(1);

    CommonOptions mode_opts, rate_opts, sweep_opts, optimize_opts,
        table1_opts, coincidence_opts;

    CLI::App* mode_cmd = app.add_subcommand(
        "mode", "Report the solved guided mode for a configuration");
    add_common(mode_cmd, mode_opts, true, false);

    CLI::App* rate_cmd =
        app.add_subcommand("rate", "Compute one vapor-integrated rate");
    add_common(rate_cmd, rate_opts, true, false);

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Evaluate the rate over the configured parameter sweep");
    add_common(sweep_cmd, sweep_opts, true, true);

    CLI::App* optimize_cmd = app.add_subcommand(
        "optimize", "Find the bandwidth that maximizes the entangled rate");
    add_common(optimize_cmd, optimize_opts, true, false);

    CLI::App* table1_cmd = app.add_subcommand(
        "table1", "Run the three built-in benchmark scenarios");
    add_common(table1_cmd, table1_opts, false, false);

    CLI::App* coincidence_cmd = app.add_subcommand(
        "coincidence", "Longitudinal coincidence profile of the pair");
    add_common(coincidence_cmd, coincidence_opts, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (mode_cmd->parsed()) {
            run_mode(mode_opts);
        } else if (rate_cmd->parsed()) {
            run_rate(rate_opts);
        } else if (sweep_cmd->parsed()) {
            run_sweep_command(sweep_opts);
        } else if (optimize_cmd->parsed()) {
            run_optimize(optimize_opts);
        } else if (table1_cmd->parsed()) {
            run_table1(table1_opts);
        } else if (coincidence_cmd->parsed()) {
            run_coincidence(coincidence_opts);
        }
    } catch (const tpa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tpa::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const tpa::Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
