#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrbackward/problems.hpp"
#include "qrbackward/regops.hpp"
#include "qrbackward/solver.hpp"

namespace qrb::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Gaussian elimination with partial pivoting on the dense form of `sys`.
std::vector<double> dense_solve(const TridiagonalSystem& sys, const std::vector<double>& rhs);

struct ResidualStats {
    double max_abs = 0.0;
    int points = 0;
};
/// Largest |w_t - D w_xx - S| over `points` random (x, t) for both species.
ResidualStats manufactured_residuals(const ManufacturedCase& problem, int points, std::uint64_t seed);

struct ThomasStats {
    double max_diff = 0.0;
    int systems = 0;
    bool all_dominant = true;
};
/// Random blocks from assemble_block with M in [3, max_M] and random rhs.
ThomasStats thomas_vs_dense(int systems, int max_M, std::uint64_t seed);

struct OperatorBoundStats {
    OperatorKind kind{};
    int sequences = 0;
    int stabilized_violations = 0;   // ||P u|| > C1 lambda ||u|| + 1e-8
    int perturbing_violations = 0;   // ||Qbar u|| > C0bar |u|_s + 1e-8
    double worst_stabilized_ratio = 0.0;
    double worst_perturbing_ratio = 0.0;
};
/// Random coefficient sequences of length `modes` on (0, pi) with mixed
/// decay rates, tested against every lambda in `lambdas`.
OperatorBoundStats operator_bounds(OperatorKind kind, double mbar, const std::vector<double>& lambdas,
                                   int sequences, int modes, std::uint64_t seed);

/// Max over a mu sweep of mu (1 - (Mbar/4) mu / lambda) - lambda / Mbar (should be <= 0).
double classical_multiplier_excess(double mbar, double lambda);

struct MseBatchStats {
    std::string label;
    double epsilon = 0.0;
    int n = 0;
    double bound = 0.0;
    int batches = 0;
    int passing = 0;
    double worst_margin = 0.0;  // max of (mean - bound) / std_error over batches
};
/// Compares empirical_mse with mse_bound (p given) for the four terminal
/// data of the two cases on a grid with M intervals.
std::vector<MseBatchStats> mse_bound_batches(const std::vector<double>& epsilons, double theta, double p,
                                                 int batches, int batch_size, int M, std::uint64_t seed);

struct RefinementStats {
    std::vector<int> K;
    std::vector<double> error;   // discrete L2 error of u and v at T, combined
    std::vector<double> ratio;   // error[i] / error[i+1]
};
/// Forward implicit Euler from the exact initial state, error at T.
RefinementStats forward_refinement(const ManufacturedCase& problem, int M, const std::vector<int>& K);

/// Discrete L2 error of the second species at T for one forward run.
double forward_error_v(const ManufacturedCase& problem, int M, int K);

/// The table printed by `qrb verify`.
std::vector<CheckResult> run_all();

}  // namespace qrb::verify
