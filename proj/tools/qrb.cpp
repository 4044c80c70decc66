#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrbackward/harness.hpp"
#include "qrbackward/verify.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

void print_error(const std::string& kind, const std::string& message, const std::string& field = {}) {
    nlohmann::json err{{"error", kind}, {"message", message}};
    if (!field.empty()) err["field"] = field;
    std::cerr << err.dump() << "\n";
}

void print_report(const qrb::ErrorReport& report) {
    std::printf("%-6s %-8s %5s %8s %4s %12s %12s %12s %12s %4s\n", "case", "epsilon", "n", "t_eps", "k", "E_u",
                "se_u", "E_v", "se_v", "excl");
    for (const auto& r : report.results) {
        std::printf("%-6s %-8.0e %5d %8.4f %4d %12.5f %12.5f %12.5f %12.5f %4d\n",
                    report.config.case_name.c_str(), r.epsilon, r.params.n, r.params.t_eps, r.k, r.mean_u,
                    r.stderr_u, r.mean_v, r.stderr_v, r.excluded);
    }
}

int run_and_emit(qrb::ExperimentConfig cfg) {
    qrb::apply_environment_overrides(cfg);
    const qrb::ErrorReport report = qrb::run_experiment(cfg);
    qrb::emit(report);
    print_report(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-reversibility regularization of backward reaction-diffusion systems"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one experiment described by a JSON config");
    std::string config_path;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over noise levels with default settings");
    qrb::ExperimentConfig sweep_cfg;
    std::string op_name = "truncation";
    std::string out_dir = "results";
    sweep->add_option("--case", sweep_cfg.case_name, "test1 | test2")->required();
    sweep->add_option("--eps", sweep_cfg.epsilons, "Comma-separated noise levels")->delimiter(',')->required();
    sweep->add_option("--samples", sweep_cfg.samples, "Monte Carlo samples per epsilon");
    sweep->add_option("--M", sweep_cfg.M, "Spatial intervals");
    sweep->add_option("--K", sweep_cfg.K, "Time levels");
    sweep->add_option("--theta", sweep_cfg.theta);
    sweep->add_option("--p", sweep_cfg.p);
    sweep->add_option("--seed", sweep_cfg.base_seed, "Base seed");
    sweep->add_option("--operator", op_name, "truncation | classical | hybrid");
    sweep->add_option("--threads", sweep_cfg.threads, "Worker threads (0 = all cores)");
    sweep->add_option("--out", out_dir, "Output directory");

    auto* verify = app.add_subcommand("verify", "Run the verification suites and print a pass/fail table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) {
            return run_and_emit(qrb::ExperimentConfig::load(config_path));
        }
        if (*sweep) {
            try {
                sweep_cfg.op = qrb::parse_operator_kind(op_name);
            } catch (const std::invalid_argument& e) {
                throw qrb::ConfigError("/operator", e.what());
            }
            const std::filesystem::path dir(out_dir);
            sweep_cfg.output.csv = dir / (sweep_cfg.case_name + ".csv");
            sweep_cfg.output.json = dir / (sweep_cfg.case_name + ".json");
            sweep_cfg.output.svg_dir = dir;
            sweep_cfg.validate();
            return run_and_emit(sweep_cfg);
        }
        if (*verify) {
            bool ok = true;
            for (const auto& c : qrb::verify::run_all()) {
                std::printf("%-4s  %-40s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }
    } catch (const qrb::ConfigError& e) {
        print_error("config", e.what(), e.field());
        return kExitConfig;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return 1;
    }
    return 0;
}
