#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qrbackward/params.hpp"
#include "qrbackward/problems.hpp"
#include "qrbackward/regops.hpp"
#include "qrbackward/solver.hpp"
#include "qrbackward/spectral.hpp"

namespace qrb {

/// Schema violation; `field` is a JSON-pointer style path such as "/M".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct OutputPaths {
    std::filesystem::path csv;
    std::filesystem::path json;
    std::filesystem::path svg_dir;
};

struct ExperimentConfig {
    std::string case_name = "test1";
    int M = 15;
    int K = 100;
    std::vector<double> epsilons{1e-3, 1e-4, 1e-5};
    double theta = 0.3;
    double p = 1.0;
    int samples = 100;
    std::uint64_t base_seed = 20200701;
    OperatorKind op = OperatorKind::TruncationQR;
    std::optional<double> ell_floor;  // case default when empty
    int threads = 0;                  // 0: hardware concurrency
    OutputPaths output;

    /// Validates every field; throws ConfigError with the offending path.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void validate() const;
};

/// Applies QRB_BASE_SEED from the environment when set.
void apply_environment_overrides(ExperimentConfig& cfg);

/// Everything that is shared by the samples of one epsilon.
struct SampleSetup {
    ManufacturedCase problem;
    RegParams params;
    SchemeConfig scheme;
    OperatorVariant variant;
    SpectralCoeffs true_u;  // <u_f, phi_j>, j = 1..n
    SpectralCoeffs true_v;
    int k = 0;              // level nearest above t_eps
    std::uint64_t base_seed = 0;
};

SampleSetup prepare_sample_setup(const ExperimentConfig& cfg, double epsilon);

struct SampleError {
    int index = 0;
    double err_u = 0.0;
    double err_v = 0.0;
    bool ok = true;
    std::string message;
};

/// (1/M) sum_{m=1..M} |w_{m,k} - w_ex(x_m, 0)|^2 for both species.
std::pair<double, double> error_metric(const Trajectory& traj, int k, const ManufacturedCase& problem,
                                       const Grid1D& grid);

/// observe (seed = base_seed + index) -> reconstruct -> solve_backward -> error at k.
/// With `exact_terminal` the reconstruction is replaced by the true terminal samples.
SampleError run_sample(const SampleSetup& setup, int sample_index, bool exact_terminal = false);
SampleError run_sample(const ExperimentConfig& cfg, double epsilon, int sample_index);

struct EpsilonResult {
    double epsilon = 0.0;
    RegParams params;
    int k = 0;
    double t_k = 0.0;
    std::vector<SampleError> samples;
    double mean_u = 0.0;
    double mean_v = 0.0;
    double stderr_u = 0.0;
    double stderr_v = 0.0;
    int excluded = 0;
};

struct ErrorReport {
    ExperimentConfig config;
    std::vector<EpsilonResult> results;
};

/// Averages of the accepted samples in index order with compensated summation.
void aggregate(EpsilonResult& result);

/// Runs every epsilon; fails if more than 10% of the samples of any epsilon
/// diverge. `threads` overrides cfg.threads when positive.
ErrorReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const ErrorReport& report);
std::string report_to_csv(const ErrorReport& report);

struct ReportSummary {
    struct Entry {
        double epsilon;
        double mean_u;
        double mean_v;
    };
    std::vector<Entry> entries;
};
ReportSummary summary_from_json(const nlohmann::json& j);

/// Writes the files named in report.config.output (empty paths are skipped).
void emit(const ErrorReport& report);
void emit(const ErrorReport& report, const OutputPaths& paths);

nlohmann::json params_to_json(const RegParams& params);

}  // namespace qrb
