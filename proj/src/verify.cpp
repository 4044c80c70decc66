#include "qrbackward/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qrbackward/params.hpp"
#include "qrbackward/statdata.hpp"

namespace qrb::verify {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double norm_sq(const std::vector<double>& c) {
    double s = 0.0;
    for (double x : c) s += x * x;
    return s;
}

}  // namespace

std::vector<double> dense_solve(const TridiagonalSystem& sys, const std::vector<double>& rhs) {
    const std::size_t n = sys.size();
    if (rhs.size() != n) throw std::invalid_argument("rhs size does not match system");
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = sys.diag[i];
        if (i > 0) a[i][i - 1] = sys.lower[i];
        if (i + 1 < n) a[i][i + 1] = sys.upper[i];
        a[i][n] = rhs[i];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (a[piv][col] == 0.0) throw std::runtime_error("singular system");
        std::swap(a[piv], a[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = a[i][n];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

ResidualStats manufactured_residuals(const ManufacturedCase& problem, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(problem.interval.a, problem.interval.b);
    std::uniform_real_distribution<double> ut(0.0, problem.T);
    ResidualStats st;
    st.points = points;
    for (int i = 0; i < points; ++i) {
        const double x = ux(rng);
        const double t = ut(rng);
        st.max_abs = std::max({st.max_abs, std::abs(manufactured_residual(problem, false, x, t)),
                               std::abs(manufactured_residual(problem, true, x, t))});
    }
    return st;
}

ThomasStats thomas_vs_dense(int systems, int max_M, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pickM(3, max_M);
    std::uniform_real_distribution<double> pickD(0.0, 4.0);
    std::uniform_real_distribution<double> pickA(0.01, 50.0);
    std::normal_distribution<double> pickRhs(0.0, 1.0);
    ThomasStats st;
    st.systems = systems;
    for (int s = 0; s < systems; ++s) {
        const TridiagonalSystem sys = assemble_block(pickD(rng), pickA(rng), pickM(rng));
        st.all_dominant = st.all_dominant && strictly_diagonally_dominant(sys) && symmetric(sys);
        std::vector<double> rhs(sys.size());
        for (double& r : rhs) r = pickRhs(rng);
        const std::vector<double> a = thomas_solve(sys, rhs);
        const std::vector<double> b = dense_solve(sys, rhs);
        for (std::size_t i = 0; i < a.size(); ++i) st.max_diff = std::max(st.max_diff, std::abs(a[i] - b[i]));
    }
    return st;
}

OperatorBoundStats operator_bounds(OperatorKind kind, double mbar, const std::vector<double>& lambdas,
                                   int sequences, int modes, std::uint64_t seed) {
    const OperatorVariant variant(kind, mbar);
    const Interval iv(0.0, std::numbers::pi);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> decay(0.0, 3.0);
    std::uniform_int_distribution<std::size_t> pick_lambda(0, lambdas.size() - 1);

    OperatorBoundStats st;
    st.kind = kind;
    st.sequences = sequences;
    for (int s = 0; s < sequences; ++s) {
        const double rate = decay(rng);
        SpectralCoeffs c;
        c.c.resize(static_cast<std::size_t>(modes));
        for (int j = 1; j <= modes; ++j) c(j) = gauss(rng) * std::pow(j, -rate);
        const FrequencyThreshold th{lambdas[pick_lambda(rng)]};

        const double pu = std::sqrt(norm_sq(apply_stabilized(variant, c, th, iv).c));
        const double qu = std::sqrt(norm_sq(apply_perturbing(variant, c, th, iv).c));
        const double u = std::sqrt(norm_sq(c.c));
        const double us = std::sqrt(sobolev_norm_sq(c, variant.source_order(), iv));
        const double p_bound = variant.c1() * th.lambda * u;
        const double q_bound = variant.c0bar() * us;
        if (pu > p_bound + 1e-8) ++st.stabilized_violations;
        if (qu > q_bound + 1e-8) ++st.perturbing_violations;
        if (p_bound > 0.0) st.worst_stabilized_ratio = std::max(st.worst_stabilized_ratio, pu / p_bound);
        if (q_bound > 0.0) st.worst_perturbing_ratio = std::max(st.worst_perturbing_ratio, qu / q_bound);
    }
    return st;
}

double classical_multiplier_excess(double mbar, double lambda) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 20000; ++i) {
        const double mu = i * (8.0 * lambda / mbar) / 20000.0;
        worst = std::max(worst, mu * (1.0 - mbar / 4.0 * mu / lambda) - lambda / mbar);
    }
    return worst;
}

std::vector<MseBatchStats> mse_bound_batches(const std::vector<double>& epsilons, double theta, double p,
                                                 int batches, int batch_size, int M, std::uint64_t seed) {
    std::vector<MseBatchStats> out;
    std::uint64_t stream = seed;
    for (const ManufacturedCase& problem : {test1(), test2()}) {
        const Grid1D grid(problem.interval, M);
        for (int species = 0; species < 2; ++species) {
            const std::vector<double> terminal = sample(
                [&](double x) { return species == 0 ? problem.u_final(x) : problem.v_final(x); }, grid);
            const SpectralCoeffs all = project_all(terminal, M - 1, grid);
            const double norm = sobolev_norm_sq(all, 2.0 * p, problem.interval);
            for (double eps : epsilons) {
                const int n = observation_count(eps, theta);
                MseBatchStats st;
                st.label = problem.name + (species == 0 ? ".u_f" : ".v_f");
                st.epsilon = eps;
                st.n = n;
                st.bound = mse_bound(eps, n, norm, eigenvalue(n, problem.interval), p);
                st.batches = batches;
                st.worst_margin = -std::numeric_limits<double>::infinity();
                for (int b = 0; b < batches; ++b) {
                    stream += 1000003;
                    const MseEstimate est = empirical_mse(terminal, grid, eps, n, batch_size, stream);
                    if (est.mean <= st.bound + 3.0 * est.std_error) ++st.passing;
                    if (est.std_error > 0.0) {
                        st.worst_margin = std::max(st.worst_margin, (est.mean - st.bound) / est.std_error);
                    }
                }
                out.push_back(st);
            }
        }
    }
    return out;
}

namespace {

std::pair<double, double> forward_errors(const ManufacturedCase& problem, int M, int K) {
    const SchemeConfig cfg(Grid1D(problem.interval, M), K, problem.T);
    auto u0 = sample([&](double x) { return problem.u.value(x, 0.0); }, cfg.grid);
    auto v0 = sample([&](double x) { return problem.v.value(x, 0.0); }, cfg.grid);
    u0.front() = u0.back() = v0.front() = v0.back() = 0.0;
    const Trajectory traj = forward_solve({std::move(u0), std::move(v0)}, problem, cfg);
    const StateField& last = traj.at(K);
    std::vector<double> du(cfg.grid.size()), dv(cfg.grid.size());
    for (int m = 0; m <= M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        du[i] = last.u[i] - problem.u.value(cfg.grid.x(m), problem.T);
        dv[i] = last.v[i] - problem.v.value(cfg.grid.x(m), problem.T);
    }
    return {trapezoid_norm_sq(du, cfg.grid), trapezoid_norm_sq(dv, cfg.grid)};
}

}  // namespace

RefinementStats forward_refinement(const ManufacturedCase& problem, int M, const std::vector<int>& K) {
    RefinementStats st;
    st.K = K;
    for (int k : K) {
        const auto [eu, ev] = forward_errors(problem, M, k);
        st.error.push_back(std::sqrt(eu + ev));
    }
    for (std::size_t i = 0; i + 1 < st.error.size(); ++i) st.ratio.push_back(st.error[i] / st.error[i + 1]);
    return st;
}

double forward_error_v(const ManufacturedCase& problem, int M, int K) {
    return std::sqrt(forward_errors(problem, M, K).second);
}

std::vector<CheckResult> run_all() {
    std::vector<CheckResult> out;

    for (const ManufacturedCase& c : {test1(), test2()}) {
        const ResidualStats r = manufactured_residuals(c, 2000, 7);
        out.push_back({"manufactured residual " + c.name, r.max_abs < 1e-9, "max |residual| = " + fmt(r.max_abs)});
    }

    const ThomasStats th = thomas_vs_dense(100, 12, 11);
    out.push_back({"thomas vs dense LU", th.max_diff < 1e-12 && th.all_dominant,
                   "max diff = " + fmt(th.max_diff) + (th.all_dominant ? ", all blocks dominant" : ", dominance FAILED")});

    const std::vector<double> lambdas = {
        frequency_threshold({1e-3, 0.3, 1.0, 1.0, 1.0}).lambda,
        frequency_threshold({1e-4, 0.3, 1.0, 1.0, 1.0}).lambda,
        frequency_threshold({1e-5, 0.3, 1.0, 1.0, 1.0}).lambda,
    };
    for (OperatorKind kind : {OperatorKind::TruncationQR, OperatorKind::HybridQR}) {
        const OperatorBoundStats s = operator_bounds(kind, 1.0, lambdas, 500, 14, 13);
        out.push_back({"stabilized/perturbing bounds " + std::string(to_string(kind)),
                       s.stabilized_violations == 0 && s.perturbing_violations == 0,
                       std::to_string(s.stabilized_violations) + " + " + std::to_string(s.perturbing_violations) +
                           " violations in " + std::to_string(s.sequences) + " sequences"});
    }
    {
        const OperatorBoundStats s = operator_bounds(OperatorKind::ClassicalQR, 1.0, lambdas, 500, 14, 13);
        out.push_back({"perturbing bound classical", s.perturbing_violations == 0,
                       std::to_string(s.perturbing_violations) + " violations"});
        double excess = -std::numeric_limits<double>::infinity();
        for (double lam : lambdas) excess = std::max(excess, classical_multiplier_excess(1.0, lam));
        out.push_back({"classical multiplier inequality", excess <= 1e-12, "max excess = " + fmt(excess)});
    }

    const auto mse = mse_bound_batches({1e-3, 1e-4, 1e-5}, 0.3, 1.0, 5, 200, 2048, 17);
    int pass = 0, total = 0;
    for (const auto& s : mse) {
        pass += s.passing;
        total += s.batches;
    }
    out.push_back({"truncated reconstruction MSE bound", pass * 100 >= 95 * total,
                   std::to_string(pass) + "/" + std::to_string(total) + " batches within bound + 3 SE"});

    const RefinementStats ref = forward_refinement(test1(), 400, {10, 20, 40, 80});
    const double min_ratio = *std::min_element(ref.ratio.begin(), ref.ratio.end());
    out.push_back({"forward refinement test1", min_ratio >= 1.8, "min error ratio per dt halving = " + fmt(min_ratio)});

    const double e2 = forward_error_v(test2(), 60, 400);
    out.push_back({"forward test2 v(T)", e2 <= 5e-3, "L2 error = " + fmt(e2)});
    return out;
}

}  // namespace qrb::verify
