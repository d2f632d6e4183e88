#pragma once

#include "dyadic/lab/config.hpp"
#include "dyadic/lab/scenarios.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dyadic::lab {

std::string code_version();

/// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

void write_csv(std::ostream& out, const Table& table);

/// Summary with verdicts, metrics, resolved config, seed, version and a
/// timestamp. Object keys are sorted.
nlohmann::json summary_json(const ScenarioResult& result, const ExperimentConfig& cfg, const std::string& timestamp);

/// Writes <out-dir>/<scenario>_<table>.csv for each table and
/// <out-dir>/<scenario>_summary.json. Returns the written paths.
std::vector<std::filesystem::path> write_artifacts(const ScenarioResult& result, const ExperimentConfig& cfg);

/// Human-readable summary: a header, then one block per verdict.
void emit_report(std::ostream& out, const ScenarioResult& result);

}  // namespace dyadic::lab
