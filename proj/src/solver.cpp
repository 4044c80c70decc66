#include "qrbackward/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrb {

namespace {

void check_field(std::span<const double> f, const Grid1D& grid, const char* name) {
    if (f.size() != grid.size()) {
        throw std::invalid_argument(std::string(name) + " has wrong number of samples");
    }
}

void check_finite(const StateField& s) {
    for (std::size_t m = 0; m < s.u.size(); ++m) {
        if (!std::isfinite(s.u[m]) || !std::isfinite(s.v[m])) {
            throw DivergenceError(s.level, "non-finite value at level " + std::to_string(s.level));
        }
    }
}

std::vector<double> solve_interior(double d_bar, const SchemeConfig& cfg, std::span<const double> rhs) {
    const TridiagonalSystem sys = assemble_block(d_bar, cfg.alpha_bar(), cfg.grid.M());
    const std::vector<double> interior = thomas_solve(sys, rhs.subspan(1, sys.size()));
    std::vector<double> out(cfg.grid.size(), 0.0);
    std::copy(interior.begin(), interior.end(), out.begin() + 1);
    return out;
}

}  // namespace

SchemeConfig::SchemeConfig(Grid1D g, int levels, double final_time)
    : grid(g), K(levels), T(final_time) {
    if (levels < 1) throw std::invalid_argument("K must be >= 1");
    if (!(final_time > 0.0)) throw std::invalid_argument("T must be positive");
}

TridiagonalSystem assemble_block(double d_bar, double alpha_bar, int M) {
    if (!(d_bar >= 0.0)) throw std::invalid_argument("Dbar must be non-negative");
    if (!(alpha_bar > 0.0)) throw std::invalid_argument("alpha_bar must be positive");
    if (M < 2) throw std::invalid_argument("M must be >= 2");
    const auto n = static_cast<std::size_t>(M - 1);
    const double off = -d_bar * alpha_bar;
    TridiagonalSystem sys;
    sys.diag.assign(n, 1.0 + 2.0 * d_bar * alpha_bar);
    sys.lower.assign(n, off);
    sys.upper.assign(n, off);
    sys.lower[0] = 0.0;
    sys.upper[n - 1] = 0.0;
    return sys;
}

bool strictly_diagonally_dominant(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(sys.lower[i]) : 0.0) +
                           (i + 1 < n ? std::abs(sys.upper[i]) : 0.0);
        if (!(sys.diag[i] > 0.0 && sys.diag[i] > off)) return false;
    }
    return true;
}

bool symmetric(const TridiagonalSystem& sys) {
    for (std::size_t i = 1; i < sys.size(); ++i) {
        if (sys.lower[i] != sys.upper[i - 1]) return false;
    }
    return true;
}

std::vector<double> thomas_solve(const TridiagonalSystem& sys, std::span<const double> rhs) {
    const std::size_t n = sys.size();
    if (rhs.size() != n) throw std::invalid_argument("rhs size does not match system");
    if (n == 0) return {};
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    c[0] = sys.upper[0] / sys.diag[0];
    d[0] = rhs[0] / sys.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sys.diag[i] - sys.lower[i] * c[i - 1];
        c[i] = i + 1 < n ? sys.upper[i] / m : 0.0;
        d[i] = (rhs[i] - sys.lower[i] * d[i - 1]) / m;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

StateField step_backward(const StateField& next, const ManufacturedCase& problem,
                         const RegParams& params, const SchemeConfig& cfg,
                         const OperatorVariant& variant) {
    const Grid1D& grid = cfg.grid;
    check_field(next.u, grid, "u");
    check_field(next.v, grid, "v");
    if (next.level < 1 || next.level > cfg.K) {
        throw std::invalid_argument("step_backward needs 1 <= level <= K");
    }
    const double t = cfg.t(next.level);
    const double dt = cfg.dt();

    const double dbar_u = effective_diffusion(next.u, problem.diffusion_u, grid);
    const double dbar_v = effective_diffusion(next.v, problem.diffusion_v, grid);

    // The radius diverges as t -> T, so the terminal step runs uncut.
    const double inf = std::numeric_limits<double>::infinity();
    const double ell_u = t < params.T ? cutoff_radius(t, params, problem.F).value : inf;
    const double ell_v = t < params.T ? cutoff_radius(t, params, problem.G).value : inf;

    const FrequencyThreshold threshold = params.threshold();
    const std::vector<double> pu = apply_stabilized(variant, next.u, grid, threshold);
    const std::vector<double> pv = apply_stabilized(variant, next.v, grid, threshold);

    std::vector<double> rhs_u(grid.size(), 0.0);
    std::vector<double> rhs_v(grid.size(), 0.0);
    for (int m = 1; m < grid.M(); ++m) {
        const auto i = static_cast<std::size_t>(m);
        const double x = grid.x(m);
        const double f = std::isinf(ell_u) ? problem.F.f(x, t, next.u[i], next.v[i])
                                           : cutoff_apply(problem.F, ell_u, x, t, next.u[i], next.v[i]);
        const double g = std::isinf(ell_v) ? problem.G.f(x, t, next.u[i], next.v[i])
                                           : cutoff_apply(problem.G, ell_v, x, t, next.u[i], next.v[i]);
        rhs_u[i] = next.u[i] - dt * f - dt * pu[i];
        rhs_v[i] = next.v[i] - dt * g - dt * pv[i];
    }

    StateField out;
    out.level = next.level - 1;
    out.u = solve_interior(dbar_u, cfg, rhs_u);
    out.v = solve_interior(dbar_v, cfg, rhs_v);
    check_finite(out);
    return out;
}

Trajectory solve_backward(std::pair<std::vector<double>, std::vector<double>> terminal,
                          const ManufacturedCase& problem, const RegParams& params,
                          const SchemeConfig& cfg, const OperatorVariant& variant) {
    check_field(terminal.first, cfg.grid, "terminal u");
    check_field(terminal.second, cfg.grid, "terminal v");
    Trajectory traj;
    traj.levels.resize(static_cast<std::size_t>(cfg.K) + 1);
    StateField& last = traj.levels.back();
    last.u = std::move(terminal.first);
    last.v = std::move(terminal.second);
    last.level = cfg.K;
    check_finite(last);
    for (int k = cfg.K - 1; k >= 0; --k) {
        traj.levels[static_cast<std::size_t>(k)] =
            step_backward(traj.levels[static_cast<std::size_t>(k) + 1], problem, params, cfg, variant);
    }
    return traj;
}

Trajectory forward_solve(std::pair<std::vector<double>, std::vector<double>> initial,
                         const ManufacturedCase& problem, const SchemeConfig& cfg) {
    const Grid1D& grid = cfg.grid;
    check_field(initial.first, grid, "initial u");
    check_field(initial.second, grid, "initial v");
    Trajectory traj;
    traj.levels.resize(static_cast<std::size_t>(cfg.K) + 1);
    StateField& first = traj.levels.front();
    first.u = std::move(initial.first);
    first.v = std::move(initial.second);
    first.level = 0;
    check_finite(first);

    const double dt = cfg.dt();
    for (int k = 0; k < cfg.K; ++k) {
        const StateField& cur = traj.levels[static_cast<std::size_t>(k)];
        const double t = cfg.t(k + 1);
        // (w_{k+1} - w_k)/dt - D(w_k) Lap_h w_{k+1} = S(x, t_{k+1}; u_k, v_k)
        std::vector<double> rhs_u(grid.size(), 0.0);
        std::vector<double> rhs_v(grid.size(), 0.0);
        for (int m = 1; m < grid.M(); ++m) {
            const auto i = static_cast<std::size_t>(m);
            const double x = grid.x(m);
            rhs_u[i] = cur.u[i] + dt * problem.F.f(x, t, cur.u[i], cur.v[i]);
            rhs_v[i] = cur.v[i] + dt * problem.G.f(x, t, cur.u[i], cur.v[i]);
        }
        StateField out;
        out.level = k + 1;
        out.u = solve_interior(nonlocal_diffusion(cur.u, problem.diffusion_u, grid), cfg, rhs_u);
        out.v = solve_interior(nonlocal_diffusion(cur.v, problem.diffusion_v, grid), cfg, rhs_v);
        check_finite(out);
        traj.levels[static_cast<std::size_t>(k) + 1] = std::move(out);
    }
    return traj;
}

int pick_time_index(double t_eps, const SchemeConfig& cfg) {
    if (!(t_eps > 0.0 && t_eps < cfg.T)) throw std::invalid_argument("t_eps must lie in (0, T)");
    // Grid times that agree with t_eps to rounding count as >= t_eps.
    const double tol = 1e-12 * cfg.T;
    int k = std::max(0, static_cast<int>(std::floor(t_eps / cfg.dt())) - 1);
    while (cfg.t(k) < t_eps - tol) ++k;
    return k;
}

}  // namespace qrb
