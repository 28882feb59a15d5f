// sheetlab command-line front end: run experiments from config files, list the
// registry, run the deterministic counterexample demo, and grid-refinement
// (convergence) sweeps.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sheetlab/averaging.hpp"
#include "sheetlab/config.hpp"
#include "sheetlab/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfigError = 2;

void print_report(const sheetlab::MCReport& report) {
    std::printf("experiment %s (config %016llx), %.2fs\n", report.experiment.c_str(),
                static_cast<unsigned long long>(report.config_hash), report.wall_seconds);
    for (const sheetlab::StatLine& line : report.stats) {
        std::printf("  [%s] %-28s estimate=%.6g se=%.3g count=%llu  (%s)\n",
                    line.pass ? "PASS" : "FAIL", line.name.c_str(), line.estimate, line.se,
                    static_cast<unsigned long long>(line.count), line.threshold.c_str());
    }
}

// Accepts "1024" or "2^10".
std::uint32_t parse_grid_token(const std::string& token) {
    const auto caret = token.find('^');
    if (caret == std::string::npos) return static_cast<std::uint32_t>(std::stoul(token));
    const unsigned long base = std::stoul(token.substr(0, caret));
    const unsigned long exp = std::stoul(token.substr(caret + 1));
    std::uint32_t value = 1;
    for (unsigned long i = 0; i < exp; ++i) value *= static_cast<std::uint32_t>(base);
    return value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheetlab: verification experiments for two-parameter stochastic calculus"};
    app.require_subcommand(1);

    // run <config>
    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "key = value config file")->required();

    // list-experiments
    CLI::App* list = app.add_subcommand("list-experiments", "print the experiment registry");

    // demo counterexample
    std::string demo_name;
    CLI::App* demo = app.add_subcommand("demo", "built-in demos");
    demo->add_option("name", demo_name, "demo name (counterexample)")->required();

    // convergence <experiment> --grids 2^8,2^10,2^12
    std::string conv_experiment;
    std::string grids_arg = "2^8,2^10,2^12";
    std::string conv_config_path;
    CLI::App* conv = app.add_subcommand("convergence", "re-run an experiment over grid sizes");
    conv->add_option("experiment", conv_experiment, "experiment name")->required();
    conv->add_option("--grids", grids_arg, "comma-separated sizes, e.g. 2^8,2^10,2^12");
    conv->add_option("--config", conv_config_path, "base config file (optional)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const std::string& name : sheetlab::experiment_names()) {
                std::printf("%s\n", name.c_str());
            }
            return kExitPass;
        }

        if (demo->parsed()) {
            if (demo_name != "counterexample") {
                std::fprintf(stderr, "unknown demo '%s' (available: counterexample)\n",
                             demo_name.c_str());
                return kExitConfigError;
            }
            const sheetlab::CounterexampleResult res = sheetlab::counterexample_demo();
            std::printf("s_q -> 1 along s_q = 1 - 1/q:\n");
            for (const auto& [s, integral] : res.table) {
                std::printf("  s = %-12.9f  integral = %g\n", s, integral);
            }
            std::printf("limit_estimate = %g\nvalue_at_1     = %g\n", res.limit_estimate,
                        res.value_at_1);
            const bool pass = res.value_at_1 == 1.0 && res.limit_estimate <= 1e-6;
            std::printf("[%s] limit 0 vs value 1 discontinuity\n", pass ? "PASS" : "FAIL");
            return pass ? kExitPass : kExitFail;
        }

        if (run->parsed()) {
            const sheetlab::ExperimentConfig config =
                sheetlab::ExperimentConfig::from_file(config_path);
            const sheetlab::MCReport report = sheetlab::run_experiment(config);
            print_report(report);
            return report.all_pass() ? kExitPass : kExitFail;
        }

        if (conv->parsed()) {
            sheetlab::ExperimentConfig config;
            if (!conv_config_path.empty()) {
                config = sheetlab::ExperimentConfig::from_file(conv_config_path);
            }
            config.set("experiment", conv_experiment);
            std::vector<std::uint32_t> grids;
            std::size_t pos = 0;
            while (pos < grids_arg.size()) {
                const auto comma = grids_arg.find(',', pos);
                const std::string token = grids_arg.substr(
                    pos, comma == std::string::npos ? std::string::npos : comma - pos);
                if (!token.empty()) grids.push_back(parse_grid_token(token));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (grids.empty()) {
                std::fprintf(stderr, "convergence: no grids given\n");
                return kExitConfigError;
            }
            // tanaka refines the t-grid only; the square-grid experiments
            // refine both axes.
            const bool square = conv_experiment != "tanaka";
            bool final_pass = false;
            std::vector<double> primary;
            for (std::uint32_t n : grids) {
                config.set_int("n", n);
                if (square) config.set_int("m", n);
                const sheetlab::MCReport report = sheetlab::run_experiment(config);
                final_pass = report.all_pass();  // thresholds gate the finest grid
                if (!report.stats.empty()) primary.push_back(report.stats.front().estimate);
                std::printf("--- grid n=%u ---\n", n);
                print_report(report);
            }
            bool monotone = primary.size() >= 2;
            for (std::size_t i = 1; i < primary.size(); ++i) {
                if (std::abs(primary[i]) > std::abs(primary[i - 1])) monotone = false;
            }
            std::printf("primary statistic |value| monotone nonincreasing across grids: %s\n",
                        monotone ? "yes" : "no");
            std::printf("convergence study: %s\n",
                        monotone && final_pass ? "PASS" : "FAIL");
            return monotone && final_pass ? kExitPass : kExitFail;
        }
    } catch (const sheetlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
    return kExitConfigError;
}
