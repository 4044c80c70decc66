#include "qrbackward/statdata.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrb {

NoiseModel::NoiseModel(double eps, std::uint64_t s) : epsilon(eps), seed(s) {
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw std::invalid_argument("noise amplitude must lie in [0, 1)");
    }
}

double GaussianStream::uniform_open() {
    // (k + 0.5) / 2^53 is never 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

ObservationSet observe(const SpectralCoeffs& true_u, const SpectralCoeffs& true_v,
                       const NoiseModel& noise, int n) {
    if (n < 1) throw std::invalid_argument("observation count must be >= 1");
    if (static_cast<std::size_t>(n) > true_u.modes() ||
        static_cast<std::size_t>(n) > true_v.modes()) {
        throw std::invalid_argument("requested " + std::to_string(n) +
                                    " modes but fewer true coefficients are available");
    }
    ObservationSet obs;
    obs.epsilon = noise.epsilon;
    obs.n = n;
    obs.seed = noise.seed;
    obs.u_obs.c.resize(static_cast<std::size_t>(n));
    obs.v_obs.c.resize(static_cast<std::size_t>(n));

    GaussianStream g(noise.seed);
    for (int j = 1; j <= n; ++j) obs.u_obs(j) = true_u(j) + noise.epsilon * g.next();
    for (int j = 1; j <= n; ++j) obs.v_obs(j) = true_v(j) + noise.epsilon * g.next();
    return obs;
}

std::pair<std::vector<double>, std::vector<double>> reconstruct(const ObservationSet& obs,
                                                                const Grid1D& grid) {
    return {synthesize(obs.u_obs, grid), synthesize(obs.v_obs, grid)};
}

double mse_bound(double epsilon, int n, double sobolev_norm_sq_2p, double mu_n, double p) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(mu_n > 0.0)) throw std::invalid_argument("mu_n must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    return epsilon * epsilon * n + sobolev_norm_sq_2p / std::pow(mu_n, 2.0 * p);
}

MseEstimate empirical_mse(std::span<const double> true_uf, const Grid1D& grid, double epsilon,
                          int n, int samples, std::uint64_t base_seed) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (n < 1 || n > grid.M() - 1) {
        throw std::invalid_argument("empirical_mse needs 1 <= n <= M-1");
    }
    const SpectralCoeffs coeffs = project_all(true_uf, n, grid);

    // U - u_f = (Phi c - u_f) + eps * Phi g. The sampled sines phi_1..phi_{M-1}
    // are orthonormal under the trapezoid rule on the uniform grid, so
    //   ||U - u_f||^2 = ||r||^2 - 2 eps sum_j g_j <phi_j, r> + eps^2 sum_j g_j^2
    // with r = u_f - Phi c computed once.
    std::vector<double> residual = synthesize(coeffs, grid);
    for (std::size_t m = 0; m < residual.size(); ++m) residual[m] = true_uf[m] - residual[m];
    const double residual_sq = trapezoid_norm_sq(residual, grid);
    const SpectralCoeffs cross = project_all(residual, n, grid);

    double mean = 0.0;
    double m2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        GaussianStream g(base_seed + static_cast<std::uint64_t>(s));
        double dot = 0.0;
        double sq = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double z = g.next();
            dot += z * cross(j);
            sq += z * z;
        }
        const double err = residual_sq - 2.0 * epsilon * dot + epsilon * epsilon * sq;
        // Welford
        const double delta = err - mean;
        mean += delta / (s + 1);
        m2 += delta * (err - mean);
    }
    MseEstimate est;
    est.mean = mean;
    est.samples = samples;
    est.std_error = samples > 1 ? std::sqrt(m2 / (samples - 1) / samples) : 0.0;
    return est;
}

}  // namespace qrb
