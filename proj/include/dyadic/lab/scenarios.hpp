#pragma once

#include "dyadic/lab/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dyadic::lab {

/// One checked statement: measured `relation` threshold.
struct Verdict {
    std::string claim;
    std::string anchor;
    double measured = 0.0;
    std::string relation;  // "<=", "<", ">=", ">", "=="
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

Verdict make_verdict(std::string claim, double measured, std::string relation, double threshold,
                     std::string detail = {});

/// A time series (or sweep) destined for one CSV file. Column names carry
/// their unit in brackets, e.g. "t [time]".
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
    std::string scenario;
    std::vector<Verdict> verdicts;
    std::vector<Table> tables;
    /// Fitted rates, CIs and other scenario-specific numbers for the JSON summary.
    nlohmann::json metrics = nlohmann::json::object();
    bool pass() const;
};

using ScenarioFn = ScenarioResult (*)(const ExperimentConfig&);

struct Scenario {
    std::string name;
    std::string description;
    Settings defaults;
    ScenarioFn run;
};

const std::vector<Scenario>& scenario_registry();
/// nullptr if unknown.
const Scenario* find_scenario(const std::string& name);

}  // namespace dyadic::lab
