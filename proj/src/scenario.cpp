#include "tpa/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"
#include "tpa/numerics.hpp"

namespace tpa {

namespace {

using nlohmann::json;

std::string trim(const std::string& text) {
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

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        while (pos < text.size() &&
               std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos != text.size() || !std::isfinite(value)) {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (const std::exception&) {
        throw ConfigError("configuration key '" + key +
                          "' has non-numeric value '" + text + "'");
    }
}

// Wavelength-style detunings and bandwidths convert through the center
// wavelength: d(omega) = 2 pi c d(lambda) / lambda^2.
double spectral_width_to_rad_s(double value, const std::string& unit,
                               double lambda_m) {
    if (unit == "nm") {
        return 2.0 * constants::pi * constants::c0 * value * 1e-9 /
               (lambda_m * lambda_m);
    }
    return value;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "fiber.diameter_nm",
        "fiber.length_mm",
        "fiber.core_index",
        "pair.kind",
        "pair.center_wavelength_nm",
        "pair.bandwidth_nm",
        "pair.bandwidth_rad_s",
        "atom.detuning_nm",
        "atom.detuning_rad_s",
        "atom.gamma1_per_s",
        "atom.gamma2_per_s",
        "atom.dipole1_nm",
        "atom.dipole2_nm",
        "vapor.density_per_cm3",
        "vapor.density_per_m3",
        "toroid.principal_diameter_um",
        "toroid.minor_diameter_nm",
        "sweep.variable",
        "sweep.lo",
        "sweep.hi",
        "sweep.steps",
        "sweep.unit",
        "output.format",
        "output.path",
    };
    return keys;
}

json report_to_json(const TpaReport& report) {
    json j;
    j["rate_R2"] = report.rate_R2;
    j["amplitude_at_surface"] = {
        {"re", report.amplitude_at_surface.real()},
        {"im", report.amplitude_at_surface.imag()},
    };
    json samples = json::array();
    for (const PerAtomSample& sample : report.per_atom_rate_map) {
        samples.push_back(
            {{"r", sample.r}, {"phi", sample.phi}, {"rate", sample.rate}});
    }
    j["per_atom_rate_map"] = samples;
    j["enhancement_factor"] =
        report.enhancement_factor ? json(*report.enhancement_factor) : json();
    j["enhancement_rate_ratio"] = report.enhancement_rate_ratio
                                      ? json(*report.enhancement_rate_ratio)
                                      : json();
    j["separation_s"] =
        report.separation_s ? json(*report.separation_s) : json();
    j["inputs_echo"] = report.inputs_echo;
    return j;
}

json row_to_json(const SweepRow& row) {
    json j;
    j["x_value"] = row.x_value ? json(*row.x_value) : json();
    j["x_unit"] = row.x_unit;
    j["rate_per_s"] = row.rate_per_s;
    j["enhancement_factor"] =
        row.enhancement_factor ? json(*row.enhancement_factor) : json();
    j["separation_s_m"] =
        row.separation_s_m ? json(*row.separation_s_m) : json();
    return j;
}

std::string render_document(
    const std::map<std::string, std::string>& parameters,
    const json& results) {
    json doc;
    doc["config_hash"] = config_hash_hex(parameters);
    doc["parameters"] = parameters;
    doc["results"] = results;
    return doc.dump(2) + "\n";
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("malformed configuration line " +
                              std::to_string(line_number) + ": '" + line +
                              "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("malformed configuration line " +
                              std::to_string(line_number) + ": '" + line +
                              "'");
        }
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> builtin_scenario(const std::string& name) {
    std::map<std::string, std::string> m{
        {"fiber.diameter_nm", "350"},
        {"fiber.length_mm", "5"},
        {"fiber.core_index", "1.4537"},
        {"pair.center_wavelength_nm", "778"},
        {"atom.detuning_rad_s", "6.54e12"},
        {"atom.gamma1_per_s", "1e9"},
        {"atom.gamma2_per_s", "1e9"},
        {"atom.dipole1_nm", "0.223"},
        {"atom.dipole2_nm", "0.0492"},
        {"vapor.density_per_cm3", "1e12"},
    };
    if (name == "table1-entangled-fiber") {
        m["pair.kind"] = "entangled";
        m["pair.bandwidth_rad_s"] = "3.11e12";
    } else if (name == "table1-mono-fiber") {
        m["pair.kind"] = "monochromatic";
    } else if (name == "table1-toroid") {
        m["pair.kind"] = "monochromatic";
        m["toroid.principal_diameter_um"] = "19";
        m["toroid.minor_diameter_nm"] = "350";
    } else {
        throw ConfigError(
            "unknown scenario '" + name +
            "'; available: table1-entangled-fiber, table1-mono-fiber, "
            "table1-toroid");
    }
    return m;
}

ScenarioConfig resolve_config(const std::map<std::string, std::string>& raw) {
    for (const auto& [key, value] : raw) {
        (void)value;
        if (known_keys().count(key) == 0) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }

    const auto has = [&](const char* key) { return raw.count(key) > 0; };
    const auto get = [&](const char* key) -> const std::string& {
        const auto it = raw.find(key);
        if (it == raw.end()) {
            throw ConfigError(std::string("missing required configuration "
                                          "key '") +
                              key + "'");
        }
        return it->second;
    };
    const auto num = [&](const char* key) { return parse_number(key, get(key)); };
    const auto positive = [&](const char* key) {
        const double value = num(key);
        if (!(value > 0.0)) {
            throw ConfigError(std::string("configuration key '") + key +
                              "' must be positive");
        }
        return value;
    };

    ScenarioConfig config;
    config.raw = raw;

    const double diameter = positive("fiber.diameter_nm") * 1e-9;
    const double length = positive("fiber.length_mm") * 1e-3;
    const double n_core = num("fiber.core_index");
    if (!(n_core > 1.0)) {
        throw ConfigError(
            "fiber.core_index must exceed the vacuum cladding index 1");
    }
    config.core_index_value = n_core;
    config.fiber = make_fiber(diameter, length, n_core);

    config.lambda_m = positive("pair.center_wavelength_nm") * 1e-9;
    const double omega0 = 2.0 * constants::pi * constants::c0 / config.lambda_m;

    const std::string kind = trim(get("pair.kind"));
    if (kind == "entangled") {
        config.pair.kind = PairKind::Entangled;
    } else if (kind == "monochromatic") {
        config.pair.kind = PairKind::Monochromatic;
    } else {
        throw ConfigError(
            "pair.kind must be 'entangled' or 'monochromatic', got '" + kind +
            "'");
    }

    // A spectral quantity may be given in exactly one unit.
    const auto exclusive_rad_s =
        [&](const char* nm_key, const char* rad_key,
            bool required) -> std::optional<double> {
        if (has(nm_key) && has(rad_key)) {
            throw ConfigError(std::string("specify exactly one of '") +
                              nm_key + "' and '" + rad_key + "'");
        }
        if (has(nm_key)) {
            return spectral_width_to_rad_s(num(nm_key), "nm", config.lambda_m);
        }
        if (has(rad_key)) {
            return num(rad_key);
        }
        if (required) {
            throw ConfigError(std::string("missing required configuration "
                                          "key: one of '") +
                              nm_key + "' or '" + rad_key + "'");
        }
        return std::nullopt;
    };

    const double delta =
        *exclusive_rad_s("atom.detuning_nm", "atom.detuning_rad_s", true);
    const std::optional<double> sigma =
        exclusive_rad_s("pair.bandwidth_nm", "pair.bandwidth_rad_s",
                        config.pair.kind == PairKind::Entangled);
    if (config.pair.kind == PairKind::Entangled && !(*sigma > 0.0)) {
        throw ConfigError("pair.bandwidth must be positive");
    }

    config.pair.omega_s0 = omega0;
    config.pair.omega_i0 = omega0;
    config.pair.sigma = sigma.value_or(0.0);

    config.atom.gamma1 = positive("atom.gamma1_per_s");
    config.atom.gamma2 = positive("atom.gamma2_per_s");
    config.atom.d1 =
        positive("atom.dipole1_nm") * 1e-9 * constants::elementary_charge;
    config.atom.d2 =
        positive("atom.dipole2_nm") * 1e-9 * constants::elementary_charge;
    config.atom.omega1 = omega0 - delta;
    config.atom.omega2 =
        config.pair.omega_s0 + config.pair.omega_i0 - config.atom.omega1;
    if (!(config.atom.omega1 > 0.0) || !(config.atom.omega2 > 0.0)) {
        throw ConfigError(
            "atom.detuning places a transition at a nonpositive frequency");
    }

    if (has("vapor.density_per_cm3") && has("vapor.density_per_m3")) {
        throw ConfigError(
            "specify exactly one of 'vapor.density_per_cm3' and "
            "'vapor.density_per_m3'");
    }
    if (has("vapor.density_per_cm3")) {
        config.vapor.density_rhoA = num("vapor.density_per_cm3") * 1e6;
    } else if (has("vapor.density_per_m3")) {
        config.vapor.density_rhoA = num("vapor.density_per_m3");
    } else {
        throw ConfigError(
            "missing required configuration key: one of "
            "'vapor.density_per_cm3' or 'vapor.density_per_m3'");
    }
    if (config.vapor.density_rhoA < 0.0) {
        throw ConfigError("vapor density must be nonnegative");
    }

    const bool has_toroid_principal = has("toroid.principal_diameter_um");
    const bool has_toroid_minor = has("toroid.minor_diameter_nm");
    if (has_toroid_principal != has_toroid_minor) {
        throw ConfigError(
            "toroid.principal_diameter_um and toroid.minor_diameter_nm must "
            "be given together");
    }
    if (has_toroid_principal) {
        ToroidSpec toroid;
        toroid.principal_diameter_Dt =
            positive("toroid.principal_diameter_um") * 1e-6;
        toroid.minor_diameter_dt = positive("toroid.minor_diameter_nm") * 1e-9;
        if (toroid.minor_diameter_dt >= 0.1 * toroid.principal_diameter_Dt) {
            throw ConfigError(
                "toroid.minor_diameter_nm must be below one tenth of the "
                "principal diameter");
        }
        config.toroid = toroid;
    }

    const bool any_sweep = has("sweep.variable") || has("sweep.lo") ||
                           has("sweep.hi") || has("sweep.steps") ||
                           has("sweep.unit");
    if (any_sweep) {
        SweepSpec sweep;
        const std::string variable = trim(get("sweep.variable"));
        if (variable == "detuning") {
            sweep.variable = SweepVariable::Detuning;
        } else if (variable == "bandwidth") {
            sweep.variable = SweepVariable::Bandwidth;
        } else {
            throw ConfigError(
                "sweep.variable must be 'detuning' or 'bandwidth', got '" +
                variable + "'");
        }
        sweep.unit = trim(get("sweep.unit"));
        if (sweep.unit != "nm" && sweep.unit != "rad_s") {
            throw ConfigError("sweep.unit must be 'nm' or 'rad_s', got '" +
                              sweep.unit + "'");
        }
        sweep.lo = num("sweep.lo");
        sweep.hi = num("sweep.hi");
        if (!(sweep.lo < sweep.hi)) {
            throw ConfigError("sweep.lo must be below sweep.hi");
        }
        const double steps_value = num("sweep.steps");
        if (std::abs(steps_value - std::round(steps_value)) > 1e-9 ||
            steps_value < 2.0 || steps_value > 1e7) {
            throw ConfigError("sweep.steps must be an integer >= 2");
        }
        sweep.steps = static_cast<int>(std::llround(steps_value));
        if (sweep.variable == SweepVariable::Bandwidth) {
            if (config.pair.kind != PairKind::Entangled) {
                throw ConfigError(
                    "sweep.variable = bandwidth requires pair.kind = "
                    "entangled");
            }
            if (!(sweep.lo > 0.0)) {
                throw ConfigError("bandwidth sweep bounds must be positive");
            }
        }
        config.sweep = sweep;
    }

    if (has("output.format")) {
        const std::string format = trim(get("output.format"));
        if (format == "csv") {
            config.format = OutputFormat::Csv;
        } else if (format == "json") {
            config.format = OutputFormat::Json;
        } else {
            throw ConfigError("output.format must be 'csv' or 'json', got '" +
                              format + "'");
        }
    }
    if (has("output.path")) {
        config.output_path = get("output.path");
    }
    return config;
}

TpaReport run_scenario(const ScenarioConfig& config) {
    if (config.toroid) {
        return microtoroid_rate(*config.toroid, config.atom, config.vapor,
                                config.lambda_m, config.core_index_value);
    }
    const GuidedMode mode_s = normalize_mode(config.fiber, config.pair.omega_s0);
    const GuidedMode mode_i =
        config.pair.omega_i0 == config.pair.omega_s0
            ? mode_s
            : normalize_mode(config.fiber, config.pair.omega_i0);
    return total_rate(mode_s, mode_i, config.atom, config.pair, config.fiber,
                      config.vapor);
}

SweepResult run_sweep(const ScenarioConfig& config, int jobs) {
    if (!config.sweep) {
        throw ConfigError("sweep requested but no sweep block is configured");
    }
    const SweepSpec& sweep = *config.sweep;
    const int steps = sweep.steps;

    std::optional<GuidedMode> mode;
    if (!config.toroid) {
        mode = normalize_mode(config.fiber, config.pair.omega_s0);
    }

    const auto evaluate = [&](double x) -> SweepRow {
        AtomicLadder atom = config.atom;
        PhotonPairSpec pair = config.pair;
        const double x_rad_s =
            spectral_width_to_rad_s(x, sweep.unit, config.lambda_m);
        if (sweep.variable == SweepVariable::Detuning) {
            atom.omega1 = pair.omega_s0 - x_rad_s;
            atom.omega2 = pair.omega_s0 + pair.omega_i0 - atom.omega1;
        } else {
            pair.sigma = x_rad_s;
        }
        const TpaReport report =
            config.toroid
                ? microtoroid_rate(*config.toroid, atom, config.vapor,
                                   config.lambda_m, config.core_index_value)
                : total_rate(*mode, *mode, atom, pair, config.fiber,
                             config.vapor);
        SweepRow row;
        row.x_value = x;
        row.x_unit = sweep.unit;
        row.rate_per_s = report.rate_R2;
        row.enhancement_factor = report.enhancement_factor;
        row.separation_s_m = report.separation_s;
        return row;
    };

    std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
    const int workers = std::clamp(jobs, 1, steps);

    std::mutex failure_mutex;
    int failure_index = -1;
    double failure_x = 0.0;
    std::exception_ptr failure;

    const auto body = [&](int worker) {
        for (int k = worker; k < steps; k += workers) {
            const double x =
                sweep.lo + (sweep.hi - sweep.lo) * static_cast<double>(k) /
                               static_cast<double>(steps - 1);
            try {
                rows[static_cast<std::size_t>(k)] = evaluate(x);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure_index < 0 || k < failure_index) {
                    failure_index = k;
                    failure_x = x;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(body, w);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    if (failure_index >= 0) {
        const std::string context =
            "sweep point x = " + format_double(failure_x) + " failed: ";
        try {
            std::rethrow_exception(failure);
        } catch (const ConfigError& e) {
            throw ConfigError(context + e.what());
        } catch (const IoError& e) {
            throw IoError(context + e.what());
        } catch (const AccuracyDomainExceeded& e) {
            throw AccuracyDomainExceeded(context + e.what());
        } catch (const std::exception& e) {
            throw NonConvergence(context + e.what());
        }
    }

    SweepResult result;
    result.variable =
        sweep.variable == SweepVariable::Detuning ? "detuning" : "bandwidth";
    result.unit = sweep.unit;
    result.rows = std::move(rows);
    return result;
}

BandwidthOptimum optimize_bandwidth(const ScenarioConfig& config) {
    if (config.pair.kind != PairKind::Entangled) {
        throw ConfigError(
            "bandwidth optimization requires pair.kind = entangled");
    }
    if (config.toroid) {
        throw ConfigError(
            "bandwidth optimization is not available for toroid runs");
    }
    double lo = 0.1e12;
    double hi = 20e12;
    if (config.sweep && config.sweep->variable == SweepVariable::Bandwidth) {
        lo = spectral_width_to_rad_s(config.sweep->lo, config.sweep->unit,
                                     config.lambda_m);
        hi = spectral_width_to_rad_s(config.sweep->hi, config.sweep->unit,
                                     config.lambda_m);
    }

    const GuidedMode mode = normalize_mode(config.fiber, config.pair.omega_s0);
    const auto rate_at = [&](double sigma) {
        PhotonPairSpec pair = config.pair;
        pair.sigma = sigma;
        return total_rate(mode, mode, config.atom, pair, config.fiber,
                          config.vapor)
            .rate_R2;
    };

    std::vector<double> prescan(32);
    for (std::size_t i = 0; i < prescan.size(); ++i) {
        const double sigma =
            lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(prescan.size() - 1);
        prescan[i] = rate_at(sigma);
    }
    if (count_interior_maxima(prescan) > 1) {
        throw NotUnimodal(
            "bandwidth pre-scan found multiple interior maxima over the "
            "bracket");
    }

    const numerics::ScalarMaximum best =
        numerics::maximize_scalar(rate_at, lo, hi, (hi - lo) * 1e-6);
    return BandwidthOptimum{best.x, best.value};
}

int count_interior_maxima(const std::vector<double>& values) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] > values[i + 1]) {
            ++count;
        }
    }
    return count;
}

std::string config_hash_hex(const std::map<std::string, std::string>& raw) {
    std::uint64_t hash = 1469598103934665603ull;
    const auto mix = [&hash](const std::string& text) {
        for (const unsigned char ch : text) {
            hash ^= ch;
            hash *= 1099511628211ull;
        }
    };
    for (const auto& [key, value] : raw) {
        mix(key);
        mix("=");
        mix(value);
        mix("\n");
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(hash));
    return buffer;
}

std::string render_csv(const std::map<std::string, std::string>& parameters,
                       const std::vector<SweepRow>& rows) {
    if (rows.empty()) {
        throw ConfigError("refusing to emit an empty result set");
    }
    std::string out;
    out += "# config_hash = " + config_hash_hex(parameters) + "\n";
    for (const auto& [key, value] : parameters) {
        out += "# " + key + " = " + value + "\n";
    }
    out += "x_value,x_unit,rate_per_s,enhancement_factor,separation_s_m\n";
    for (const SweepRow& row : rows) {
        if (row.x_value) {
            out += format_double(*row.x_value);
        }
        out += "," + row.x_unit + ",";
        out += format_double(row.rate_per_s);
        out += ",";
        if (row.enhancement_factor) {
            out += format_double(*row.enhancement_factor);
        }
        out += ",";
        if (row.separation_s_m) {
            out += format_double(*row.separation_s_m);
        }
        out += "\n";
    }
    return out;
}

std::string render_json(const std::map<std::string, std::string>& parameters,
                        const TpaReport& report) {
    return render_document(parameters, json{{"report", report_to_json(report)}});
}

std::string render_json(const std::map<std::string, std::string>& parameters,
                        const SweepResult& sweep) {
    if (sweep.rows.empty()) {
        throw ConfigError("refusing to emit an empty result set");
    }
    json rows = json::array();
    for (const SweepRow& row : sweep.rows) {
        rows.push_back(row_to_json(row));
    }
    const json results{{"sweep", {{"variable", sweep.variable},
                                  {"unit", sweep.unit},
                                  {"rows", rows}}}};
    return render_document(parameters, results);
}

std::string render_json_rows(
    const std::map<std::string, std::string>& parameters,
    const std::string& label, const std::vector<SweepRow>& rows) {
    if (rows.empty()) {
        throw ConfigError("refusing to emit an empty result set");
    }
    json encoded = json::array();
    for (const SweepRow& row : rows) {
        encoded.push_back(row_to_json(row));
    }
    return render_document(parameters,
                           json{{"label", label}, {"rows", encoded}});
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) {
            throw IoError("failed to write to standard output");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!in.good() && !in.eof()) {
        throw IoError("failed while reading '" + path + "'");
    }
    return buffer.str();
}

}  // namespace tpa
