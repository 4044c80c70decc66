#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrbackward/params.hpp"
#include "qrbackward/problems.hpp"
#include "qrbackward/regops.hpp"
#include "qrbackward/spectral.hpp"

namespace qrb {

/// Both species on the grid at one time level; endpoints are Dirichlet zeros.
struct StateField {
    std::vector<double> u;
    std::vector<double> v;
    int level = 0;
};

struct SchemeConfig {
    Grid1D grid;
    int K;
    double T;

    SchemeConfig(Grid1D g, int levels, double final_time);

    double dt() const { return T / K; }
    double alpha_bar() const { return dt() / (grid.dx() * grid.dx()); }
    double t(int k) const { return k == K ? T : k * dt(); }
};

/// Levels indexed by k = 0..K; a backward solve fills them from K down to 0.
struct Trajectory {
    std::vector<StateField> levels;

    const StateField& at(int k) const { return levels.at(static_cast<std::size_t>(k)); }
    std::size_t size() const { return levels.size(); }
};

struct TridiagonalSystem {
    std::vector<double> lower;  // lower[0] unused
    std::vector<double> diag;
    std::vector<double> upper;  // upper[n-1] unused

    std::size_t size() const { return diag.size(); }
};

/// M-1 unknowns, diagonal 1 + 2 Dbar alpha, off-diagonals -Dbar alpha.
/// Dbar = 0 is allowed (identity block); negative Dbar is rejected.
TridiagonalSystem assemble_block(double d_bar, double alpha_bar, int M);

bool strictly_diagonally_dominant(const TridiagonalSystem& sys);
bool symmetric(const TridiagonalSystem& sys);

/// Thomas algorithm; no pivoting, intended for diagonally dominant systems.
std::vector<double> thomas_solve(const TridiagonalSystem& sys, std::span<const double> rhs);

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int level, const std::string& what)
        : std::runtime_error(what), level_(level) {}
    int level() const { return level_; }

private:
    int level_;
};

/// One semi-implicit step from level k+1 to level k: the coefficient, the
/// cut-off sources and the stabilized operator use the known level.
StateField step_backward(const StateField& next, const ManufacturedCase& problem,
                         const RegParams& params, const SchemeConfig& cfg,
                         const OperatorVariant& variant);

Trajectory solve_backward(std::pair<std::vector<double>, std::vector<double>> terminal,
                          const ManufacturedCase& problem, const RegParams& params,
                          const SchemeConfig& cfg, const OperatorVariant& variant);

/// Implicit Euler march of the well-posed forward system from t = 0 to T.
Trajectory forward_solve(std::pair<std::vector<double>, std::vector<double>> initial,
                         const ManufacturedCase& problem, const SchemeConfig& cfg);

/// Smallest k with t_k >= t_eps.
int pick_time_index(double t_eps, const SchemeConfig& cfg);

}  // namespace qrb
