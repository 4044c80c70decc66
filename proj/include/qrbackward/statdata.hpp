#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qrbackward/spectral.hpp"

namespace qrb {

/// Noise amplitude and seed. epsilon = 0 is accepted as the noiseless limit.
struct NoiseModel {
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    NoiseModel() = default;
    NoiseModel(double eps, std::uint64_t s);
};

/// Standard normal draws: std::mt19937_64 seeded with the given value, two
/// 53-bit uniforms per Box-Muller pair (cosine branch first). Fully specified,
/// so streams replay bit-for-bit across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    double uniform_open();

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Binned noisy terminal coefficients for both species.
struct ObservationSet {
    double epsilon = 0.0;
    int n = 0;
    SpectralCoeffs u_obs;
    SpectralCoeffs v_obs;
    std::uint64_t seed = 0;
};

/// u_obs[j] = <u_f, phi_j> + eps * g_j; the u channel consumes the first n
/// draws of the stream and the v channel the next n.
ObservationSet observe(const SpectralCoeffs& true_u, const SpectralCoeffs& true_v,
                       const NoiseModel& noise, int n);

/// Truncated Fourier reconstruction of both terminal fields on the grid.
std::pair<std::vector<double>, std::vector<double>> reconstruct(const ObservationSet& obs,
                                                                const Grid1D& grid);

/// eps^2 n + norm / mu_n^(2p)
double mse_bound(double epsilon, int n, double sobolev_norm_sq_2p, double mu_n, double p);

struct MseEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

/// Monte Carlo estimate of E||U_f^{eps,n} - u_f||^2 with trapezoid norms on
/// the grid. Sample s uses seed base_seed + s. Requires n <= M - 1.
MseEstimate empirical_mse(std::span<const double> true_uf, const Grid1D& grid, double epsilon,
                          int n, int samples, std::uint64_t base_seed);

}  // namespace qrb
