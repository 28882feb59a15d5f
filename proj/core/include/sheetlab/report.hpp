#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sheetlab/config.hpp"

namespace sheetlab {

struct StatLine {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;  // NaN when not available (single replica)
    std::uint64_t count = 0;
    std::string threshold;  // the exact pass criterion, human readable
    bool pass = true;

    bool operator==(const StatLine& o) const;
};

/// Monte Carlo experiment record: per-statistic estimates with the exact
/// threshold each pass/fail decision used, plus the config that produced it.
/// Wall-clock goes to the console, not into the emitted files, which are
/// deterministic functions of (config, build).
struct MCReport {
    std::string experiment;
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<StatLine> stats;
    double wall_seconds = 0.0;

    bool all_pass() const {
        for (const auto& line : stats) {
            if (!line.pass) return false;
        }
        return true;
    }

    bool same_results(const MCReport& o) const {
        return experiment == o.experiment && config == o.config && config_hash == o.config_hash &&
               stats == o.stats;
    }
};

/// CSV: "# schema=..." and config comment lines, then
/// name,estimate,se,count,threshold,pass. Header-only for an empty stat list.
void emit_report_csv(const MCReport& report, const std::string& filename);

/// JSON with the same content (schema sheetlab.report.v1).
void emit_report_json(const MCReport& report, const std::string& filename);

/// Re-parse an emitted JSON report; round-trips same_results()-equal.
MCReport parse_report_json(const std::string& filename);

}  // namespace sheetlab
