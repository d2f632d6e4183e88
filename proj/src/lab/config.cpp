#include "dyadic/lab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dyadic::lab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    T out{};
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty())
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    return out;
}

struct Field {
    std::string help;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<nlohmann::json(const ExperimentConfig&)> get;
};

template <class T>
Field number_field(T ExperimentConfig::*member, std::string help) {
    return {std::move(help),
            [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_number<T>(k, v);
            },
            [member](const ExperimentConfig& c) { return nlohmann::json(c.*member); }};
}

Field text_field(std::string ExperimentConfig::*member, std::string help) {
    return {std::move(help),
            [member](ExperimentConfig& c, const std::string&, const std::string& v) { c.*member = trim(v); },
            [member](const ExperimentConfig& c) { return nlohmann::json(c.*member); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = {
        {"lambda", number_field(&ExperimentConfig::lambda, "wavenumber ratio (k_n = lambda^n)")},
        {"n-modes", number_field(&ExperimentConfig::n_modes, "truncation size N")},
        {"r", number_field(&ExperimentConfig::r, "Gaussian variance per coordinate")},
        {"truncation", text_field(&ExperimentConfig::truncation, "absorbing | conservative")},
        {"scheme", text_field(&ExperimentConfig::scheme, "rotation-splitting | euler-maruyama")},
        {"dt", number_field(&ExperimentConfig::dt, "time step")},
        {"t-final", number_field(&ExperimentConfig::t_final, "final time T")},
        {"n-times", number_field(&ExperimentConfig::n_times, "number of output intervals on [0, T]")},
        {"paths", number_field(&ExperimentConfig::paths, "Monte Carlo paths")},
        {"outer-m", number_field(&ExperimentConfig::outer_m, "outer samples for nested Monte Carlo")},
        {"inner-m", number_field(&ExperimentConfig::inner_m, "inner copies per outer sample")},
        {"seed", number_field(&ExperimentConfig::seed, "master seed")},
        {"threads", number_field(&ExperimentConfig::threads, "worker threads (0 = hardware)")},
        {"out-dir", text_field(&ExperimentConfig::out_dir, "directory for CSV and JSON output")},
        {"tolerance", number_field(&ExperimentConfig::tolerance, "ODE / eigenvalue tolerance")},
        {"z-threshold", number_field(&ExperimentConfig::z_threshold, "z-score threshold for statistical verdicts")},
        {"mode", number_field(&ExperimentConfig::mode, "observable mode index l")},
        {"fit-lo", number_field(&ExperimentConfig::fit_lo, "start of the rate-fit window")},
        {"fit-hi", number_field(&ExperimentConfig::fit_hi, "end of the rate-fit window")},
        {"lambdas", text_field(&ExperimentConfig::lambdas, "comma-separated lambda list")},
        {"n-list", text_field(&ExperimentConfig::n_list, "comma-separated N list")},
        {"terms", number_field(&ExperimentConfig::terms, "partial-sum length for series criteria")},
    };
    return table;
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
    static const std::vector<KeyInfo> keys = [] {
        std::vector<KeyInfo> k;
        for (const auto& [name, f] : fields()) k.push_back({name, f.help});
        return k;
    }();
    return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(cfg, key, value);
}

void apply_settings(ExperimentConfig& cfg, const Settings& settings) {
    for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
}

Settings parse_config_text(const std::string& text) {
    Settings out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return out;
}

Settings read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ExperimentConfig resolve_config(const std::string& scenario, const Settings& scenario_defaults,
                                const Settings& file, const Settings& flags) {
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    apply_settings(cfg, scenario_defaults);
    apply_settings(cfg, file);
    apply_settings(cfg, flags);
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    j["scenario"] = cfg.scenario;
    for (const auto& [name, f] : fields()) j[name] = f.get(cfg);
    return j;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!trim(item).empty()) out.push_back(parse_number<double>("list", item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!trim(item).empty()) out.push_back(parse_number<int>("list", item));
    return out;
}

}  // namespace dyadic::lab
