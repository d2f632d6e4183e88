#include "dyadic/lab/cli.hpp"

#include "dyadic/lab/config.hpp"
#include "dyadic/lab/report.hpp"
#include "dyadic/lab/scenarios.hpp"

#include <CLI11.hpp>

#include <map>
#include <ostream>

namespace dyadic::lab {

namespace {

std::string usage(const CLI::App& app) {
    std::string s = app.help();
    s += "\nScenarios:\n";
    for (const auto& sc : scenario_registry()) s += "  " + sc.name + "  " + sc.description + "\n";
    return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dyadic-lab: numerical experiments on the stochastic dyadic model", "dyadic-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    std::map<std::string, std::string> flag_values;
    std::vector<std::string> extra;
    std::string config_path;
    bool no_write = false;

    auto* list = app.add_subcommand("list", "list scenarios and config keys");
    for (const auto& sc : scenario_registry()) {
        auto* sub = app.add_subcommand(sc.name, sc.description);
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--set", extra, "extra key=value settings (repeatable)");
        sub->add_flag("--no-write", no_write, "print the report without writing CSV/JSON");
        for (const auto& k : config_keys()) sub->add_option("--" + k.key, flag_values[k.key], k.help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << usage(app);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << code_version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << usage(app);
        return 2;
    }

    if (list->parsed()) {
        for (const auto& sc : scenario_registry()) out << sc.name << "\t" << sc.description << '\n';
        out << "\nconfig keys:\n";
        for (const auto& k : config_keys()) out << "  " << k.key << "\t" << k.help << '\n';
        return 0;
    }

    const Scenario* scenario = nullptr;
    for (const auto& sc : scenario_registry())
        if (app.got_subcommand(sc.name)) scenario = find_scenario(sc.name);
    if (!scenario) {
        err << usage(app);
        return 2;
    }

    ExperimentConfig cfg;
    try {
        Settings flags;
        for (const auto& k : config_keys()) {
            const auto* opt = app.get_subcommand(scenario->name)->get_option("--" + k.key);
            if (opt->count() > 0) flags.emplace_back(k.key, flag_values[k.key]);
        }
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            flags.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
        const Settings file = config_path.empty() ? Settings{} : read_config_file(config_path);
        cfg = resolve_config(scenario->name, scenario->defaults, file, flags);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    ScenarioResult result;
    try {
        result = scenario->run(cfg);
    } catch (const std::exception& e) {
        err << "{\"scenario\":\"" << scenario->name << "\",\"error\":" << nlohmann::json(e.what()).dump() << "}\n";
        return 2;
    }
    result.scenario = scenario->name;

    emit_report(out, result);
    if (!no_write) {
        for (const auto& p : write_artifacts(result, cfg)) out << "wrote " << p.string() << '\n';
    }
    if (!result.pass()) {
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& v : result.verdicts)
            if (!v.pass) failures.push_back({{"claim", v.claim}, {"measured", format_number(v.measured)},
                                             {"threshold", v.relation + " " + format_number(v.threshold)}});
        err << failures.dump() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace dyadic::lab
