#include "sheetlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sheetlab {

namespace {

constexpr const char* kSchema = "sheetlab.report.v1";

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool double_eq(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return a == b;
}

}  // namespace

bool StatLine::operator==(const StatLine& o) const {
    return name == o.name && double_eq(estimate, o.estimate) && double_eq(se, o.se) &&
           count == o.count && threshold == o.threshold && pass == o.pass;
}

void emit_report_csv(const MCReport& report, const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "w");
    if (!f) throw std::runtime_error("emit_report_csv: cannot open " + filename);
    std::fprintf(f, "# schema=%s\n", kSchema);
    std::fprintf(f, "# experiment=%s\n", report.experiment.c_str());
    std::fprintf(f, "# config_hash=%016llx\n",
                 static_cast<unsigned long long>(report.config_hash));
    for (const auto& [key, value] : report.config.entries()) {
        std::fprintf(f, "# config.%s=%s\n", key.c_str(), value.c_str());
    }
    std::fprintf(f, "name,estimate,se,count,threshold,pass\n");
    for (const StatLine& line : report.stats) {
        std::fprintf(f, "%s,%s,%s,%llu,\"%s\",%d\n", line.name.c_str(),
                     format_real(line.estimate).c_str(), format_real(line.se).c_str(),
                     static_cast<unsigned long long>(line.count), line.threshold.c_str(),
                     line.pass ? 1 : 0);
    }
    std::fclose(f);
}

void emit_report_json(const MCReport& report, const std::string& filename) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["experiment"] = report.experiment;
    j["config_hash"] = report.config_hash;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [key, value] : report.config.entries()) config[key] = value;
    j["config"] = config;
    nlohmann::json stats = nlohmann::json::array();
    for (const StatLine& line : report.stats) {
        nlohmann::json s;
        s["name"] = line.name;
        // doubles as strings: exact round-trip and byte-stable output
        s["estimate"] = format_real(line.estimate);
        s["se"] = format_real(line.se);
        s["count"] = line.count;
        s["threshold"] = line.threshold;
        s["pass"] = line.pass;
        stats.push_back(s);
    }
    j["stats"] = stats;
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("emit_report_json: cannot open " + filename);
    out << j.dump(2) << "\n";
}

MCReport parse_report_json(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("parse_report_json: cannot open " + filename);
    nlohmann::json j;
    in >> j;
    if (j.value("schema", "") != kSchema) {
        throw std::runtime_error("parse_report_json: unexpected schema");
    }
    MCReport report;
    report.experiment = j.value("experiment", "");
    report.config_hash = j.value("config_hash", std::uint64_t{0});
    for (const auto& [key, value] : j.at("config").items()) {
        report.config.set(key, value.get<std::string>());
    }
    for (const auto& s : j.at("stats")) {
        StatLine line;
        line.name = s.value("name", "");
        line.estimate = std::strtod(s.value("estimate", "nan").c_str(), nullptr);
        line.se = std::strtod(s.value("se", "nan").c_str(), nullptr);
        line.count = s.value("count", std::uint64_t{0});
        line.threshold = s.value("threshold", "");
        line.pass = s.value("pass", false);
        report.stats.push_back(std::move(line));
    }
    return report;
}

}  // namespace sheetlab
