#include "dyadic/lab/report.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

#ifndef DYADIC_VERSION
#define DYADIC_VERSION "unknown"
#endif

namespace dyadic::lab {

std::string code_version() { return DYADIC_VERSION; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

namespace {

// JSON has no NaN or infinity; those become strings.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

}  // namespace

nlohmann::json summary_json(const ScenarioResult& result, const ExperimentConfig& cfg, const std::string& timestamp) {
    nlohmann::json j;
    j["scenario"] = result.scenario;
    j["pass"] = result.pass();
    j["version"] = code_version();
    j["timestamp"] = timestamp;
    j["seed"] = cfg.seed;
    j["config"] = to_json(cfg);
    j["metrics"] = result.metrics;
    j["verdicts"] = nlohmann::json::array();
    j["failures"] = nlohmann::json::array();
    for (const auto& v : result.verdicts) {
        nlohmann::json e;
        e["claim"] = v.claim;
        e["anchor"] = v.anchor;
        e["measured"] = number(v.measured);
        e["relation"] = v.relation;
        e["threshold"] = number(v.threshold);
        e["pass"] = v.pass;
        e["detail"] = v.detail;
        j["verdicts"].push_back(e);
        if (!v.pass) j["failures"].push_back(v.claim);
    }
    j["tables"] = nlohmann::json::array();
    for (const auto& t : result.tables) j["tables"].push_back(result.scenario + "_" + t.name + ".csv");
    return j;
}

std::vector<std::filesystem::path> write_artifacts(const ScenarioResult& result, const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> written;
    for (const auto& t : result.tables) {
        const fs::path p = dir / (result.scenario + "_" + t.name + ".csv");
        std::ofstream out(p, std::ios::binary);
        write_csv(out, t);
        if (!out) throw std::runtime_error("failed to write " + p.string());
        written.push_back(p);
    }

    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    const fs::path js = dir / (result.scenario + "_summary.json");
    std::ofstream out(js, std::ios::binary);
    out << summary_json(result, cfg, stamp).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed to write " + js.string());
    written.push_back(js);
    return written;
}

void emit_report(std::ostream& out, const ScenarioResult& result) {
    out << "== " << (result.scenario.empty() ? "(no scenario)" : result.scenario) << " ==\n";
    for (const auto& v : result.verdicts) {
        out << "claim:     " << v.claim << '\n'
            << "anchor:    " << v.anchor << '\n'
            << "measured:  " << format_number(v.measured) << '\n'
            << "threshold: " << v.relation << ' ' << format_number(v.threshold) << '\n'
            << "verdict:   " << (v.pass ? "PASS" : "FAIL") << '\n';
        if (!v.detail.empty()) out << "detail:    " << v.detail << '\n';
        out << '\n';
    }
    for (const auto& [key, value] : result.metrics.items()) {
        if (value.is_number()) out << key << ": " << format_number(value.get<double>()) << '\n';
        else if (value.is_string()) out << key << ": " << value.get<std::string>() << '\n';
    }
}

}  // namespace dyadic::lab
