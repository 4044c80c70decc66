#include "qrbackward/regops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrb {

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("frequency threshold must be positive");
}

}  // namespace

std::string_view to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::TruncationQR: return "truncation";
        case OperatorKind::ClassicalQR: return "classical";
        case OperatorKind::HybridQR: return "hybrid";
    }
    return "unknown";
}

OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "truncation") return OperatorKind::TruncationQR;
    if (name == "classical") return OperatorKind::ClassicalQR;
    if (name == "hybrid") return OperatorKind::HybridQR;
    throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

OperatorVariant::OperatorVariant(OperatorKind k, double upper_bound) : kind(k), mbar(upper_bound) {
    if (!(upper_bound > 0.0)) throw std::invalid_argument("Mbar must be positive");
}

double OperatorVariant::c0bar() const {
    switch (kind) {
        case OperatorKind::TruncationQR: return mbar;
        case OperatorKind::ClassicalQR: return mbar * mbar / 4.0;
        case OperatorKind::HybridQR: return mbar * mbar / 4.0 + mbar;
    }
    return 0.0;
}

double OperatorVariant::c1() const {
    return kind == OperatorKind::TruncationQR ? mbar : 1.0;
}

double OperatorVariant::source_order() const {
    return kind == OperatorKind::ClassicalQR ? 4.0 : 2.0;
}

FrequencyThreshold frequency_threshold(const ThresholdInputs& in) {
    if (!(in.epsilon > 0.0 && in.epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (!(in.theta > 0.0 && in.theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    if (!(in.p > 0.0)) throw std::invalid_argument("p must be positive");
    if (!(in.C1 > 0.0)) throw std::invalid_argument("C1 must be positive");
    if (!(in.T > 0.0)) throw std::invalid_argument("T must be positive");
    const double exponent = std::max(in.theta - 1.0, -4.0 * in.theta * in.p);
    return FrequencyThreshold{exponent * std::log(in.epsilon) / (in.C1 * in.T)};
}

std::vector<int> admissible_set(const FrequencyThreshold& threshold, const Interval& iv) {
    std::vector<int> modes;
    for (int j = 1; eigenvalue(j, iv) <= threshold.lambda; ++j) modes.push_back(j);
    return modes;
}

double perturbing_multiplier(const OperatorVariant& variant, double mu, double lambda) {
    const double mbar = variant.mbar;
    switch (variant.kind) {
        case OperatorKind::TruncationQR:
            return mu > lambda ? mbar * mu : 0.0;
        case OperatorKind::ClassicalQR:
            check_lambda(lambda);
            return mbar * mbar / 4.0 * mu * mu / lambda;
        case OperatorKind::HybridQR:
            check_lambda(lambda);
            return mu <= std::pow(lambda, 0.25) ? mbar * mbar / 4.0 * mu * mu / lambda : mbar * mu;
    }
    return 0.0;
}

double stabilized_multiplier(const OperatorVariant& variant, double mu, double lambda) {
    const double mbar = variant.mbar;
    switch (variant.kind) {
        case OperatorKind::TruncationQR:
            return mu <= lambda ? -mbar * mu : 0.0;
        case OperatorKind::ClassicalQR:
            check_lambda(lambda);
            return -mbar * mu * (1.0 - mbar / 4.0 * mu / lambda);
        case OperatorKind::HybridQR:
            check_lambda(lambda);
            return mu <= std::pow(lambda, 0.25) ? mbar * mbar / 4.0 * mu * mu / lambda - mbar * mu
                                                : 0.0;
    }
    return 0.0;
}

namespace {

template <typename Multiplier>
SpectralCoeffs scale(const SpectralCoeffs& coeffs, const Interval& iv, Multiplier&& mult) {
    SpectralCoeffs out;
    out.c.resize(coeffs.modes());
    for (std::size_t k = 0; k < coeffs.modes(); ++k) {
        const int j = static_cast<int>(k) + 1;
        out.c[k] = mult(eigenvalue(j, iv)) * coeffs.c[k];
    }
    return out;
}

}  // namespace

SpectralCoeffs apply_perturbing(const OperatorVariant& variant, const SpectralCoeffs& coeffs,
                                const FrequencyThreshold& threshold, const Interval& iv) {
    return scale(coeffs, iv,
                 [&](double mu) { return perturbing_multiplier(variant, mu, threshold.lambda); });
}

SpectralCoeffs apply_stabilized(const OperatorVariant& variant, const SpectralCoeffs& coeffs,
                                const FrequencyThreshold& threshold, const Interval& iv) {
    return scale(coeffs, iv,
                 [&](double mu) { return stabilized_multiplier(variant, mu, threshold.lambda); });
}

std::vector<int> stabilized_modes(const OperatorVariant& variant, const Grid1D& grid,
                                  const FrequencyThreshold& threshold) {
    if (variant.kind != OperatorKind::TruncationQR) check_lambda(threshold.lambda);
    const int jmax = grid.M() - 1;
    std::vector<int> modes;
    for (int j = 1; j <= jmax; ++j) {
        const double mu = eigenvalue(j, grid.interval());
        switch (variant.kind) {
            case OperatorKind::TruncationQR:
                if (mu > threshold.lambda) return modes;
                break;
            case OperatorKind::ClassicalQR:
                break;
            case OperatorKind::HybridQR:
                if (mu > std::pow(threshold.lambda, 0.25)) return modes;
                break;
        }
        modes.push_back(j);
    }
    return modes;
}

std::vector<double> apply_stabilized(const OperatorVariant& variant, std::span<const double> u,
                                     const Grid1D& grid, const FrequencyThreshold& threshold) {
    std::vector<double> out(grid.size(), 0.0);
    for (int j : stabilized_modes(variant, grid, threshold)) {
        const EigenPair e = eigenpair(j, grid.interval());
        const double coeff = stabilized_multiplier(variant, e.mu, threshold.lambda) * project(u, j, grid);
        if (coeff == 0.0) continue;
        for (int m = 1; m < grid.M(); ++m) {
            out[static_cast<std::size_t>(m)] += coeff * e.phi(grid.x(m));
        }
    }
    return out;
}

}  // namespace qrb
