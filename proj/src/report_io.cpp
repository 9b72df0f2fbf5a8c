#include "betawalk/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace betawalk {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["name"] = report.name;
    j["params"] = {{"alpha", report.params.alpha}, {"beta", report.params.beta}};
    j["lambda"] = report.lambda;
    j["xi1"] = report.xi1;
    j["n_replicas"] = report.n_replicas;
    nlohmann::ordered_json estimates = nlohmann::ordered_json::object();
    for (const auto& e : report.estimates)
        estimates[e.name] = {{"value", e.value}, {"stderr", e.se}};
    j["estimates"] = estimates;
    if (report.fit) {
        j["fit"] = {{"slope", report.fit->slope},
                    {"intercept", report.fit->intercept},
                    {"r2", report.fit->r2},
                    {"n_used", report.fit->n_used},
                    {"dropped_smallest", report.fit->dropped_smallest}};
    }
    if (!report.tests.empty()) {
        nlohmann::ordered_json tests = nlohmann::ordered_json::array();
        for (const auto& t : report.tests)
            tests.push_back({{"name", t.name},
                             {"n", t.n},
                             {"ks_stat", t.statistic},
                             {"p_value", t.p_value},
                             {"pass", t.pass}});
        j["tests"] = tests;
    }
    if (!report.table_columns.empty()) {
        j["table"] = {{"columns", report.table_columns}, {"rows", report.table_rows}};
    }
    j["ok"] = report.ok;
    j["manifest"] = {{"seed", report.seed},
                     {"runtime_seconds", report.runtime_seconds},
                     {"version", report.version},
                     {"notes", report.notes}};
    return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out;
    if (!report.table_columns.empty()) {
        for (std::size_t c = 0; c < report.table_columns.size(); ++c) {
            if (c) out += ',';
            out += report.table_columns[c];
        }
        out += '\n';
        for (const auto& row : report.table_rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += format_double(row[c]);
            }
            out += '\n';
        }
        return out;
    }
    // Fallback schema: one row per point estimate.
    out = "name,value,stderr\n";
    for (const auto& e : report.estimates)
        out += e.name + ',' + format_double(e.value) + ',' + format_double(e.se) + '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& output_path, const std::string& config_json,
                    std::uint64_t seed, double wall_seconds) {
    nlohmann::ordered_json j;
    j["config"] = nlohmann::ordered_json::parse(config_json);
    j["seed"] = seed;
    j["version"] = kVersion;
    j["wall_seconds"] = wall_seconds;
    write_text_file(output_path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace betawalk
