#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyadic::lab {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every knob a scenario reads. Keys in config files and flag names are the
/// same strings (see config_keys()).
struct ExperimentConfig {
    std::string scenario;

    double lambda = 2.0;
    int n_modes = 16;
    double r = 1.0;
    std::string truncation = "conservative";

    std::string scheme = "rotation-splitting";
    double dt = 1e-3;
    double t_final = 1.0;
    int n_times = 10;

    std::uint64_t paths = 1000;
    std::uint64_t outer_m = 1000;
    int inner_m = 2;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    std::string out_dir = ".";

    double tolerance = 1e-10;
    double z_threshold = 4.0;
    int mode = 1;
    double fit_lo = 0.0;  // scenario-specific meaning; see the registry
    double fit_hi = 0.0;
    std::string lambdas = "1,1.5,2";
    std::string n_list = "25,50,100";
    std::int64_t terms = 10000;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

struct KeyInfo {
    std::string key;
    std::string help;
};
const std::vector<KeyInfo>& config_keys();

/// Sets one field from its textual form. Numbers are parsed with
/// std::from_chars, so the locale never matters.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_settings(ExperimentConfig& cfg, const Settings& settings);

/// Flat "key = value" lines; blank lines and lines starting with '#' are skipped.
Settings parse_config_text(const std::string& text);
Settings read_config_file(const std::filesystem::path& path);

/// Defaults, then scenario defaults, then the file, then flags.
ExperimentConfig resolve_config(const std::string& scenario, const Settings& scenario_defaults,
                                const Settings& file, const Settings& flags);

/// Resolved config as a JSON object keyed by config_keys() (plus "scenario").
nlohmann::json to_json(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

}  // namespace dyadic::lab
