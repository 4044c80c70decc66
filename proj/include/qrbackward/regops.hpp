#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrbackward/spectral.hpp"

namespace qrb {

enum class OperatorKind { TruncationQR, ClassicalQR, HybridQR };

std::string_view to_string(OperatorKind kind);
OperatorKind parse_operator_kind(std::string_view name);  // "truncation" | "classical" | "hybrid"

/// One of the three spectral perturbations of the Laplacian, with the
/// constants of its perturbing bound (C0bar, source order s) and of its
/// stabilized bound (C1).
struct OperatorVariant {
    OperatorKind kind = OperatorKind::TruncationQR;
    double mbar = 1.0;

    OperatorVariant() = default;
    OperatorVariant(OperatorKind k, double upper_bound);

    double c0bar() const;
    double c1() const;
    double source_order() const;
};

/// lambda_eps = log(gamma(T, beta)); frequencies with mu_j <= lambda are admissible.
struct FrequencyThreshold {
    double lambda = 0.0;
};

struct ThresholdInputs {
    double epsilon = 0.0;
    double theta = 0.0;
    double p = 0.0;
    double C1 = 0.0;
    double T = 0.0;
};

FrequencyThreshold frequency_threshold(const ThresholdInputs& in);

std::vector<int> admissible_set(const FrequencyThreshold& threshold, const Interval& iv);

// Spectral multipliers of Qbar and P at eigenvalue mu.
double perturbing_multiplier(const OperatorVariant& variant, double mu, double lambda);
double stabilized_multiplier(const OperatorVariant& variant, double mu, double lambda);

SpectralCoeffs apply_perturbing(const OperatorVariant& variant, const SpectralCoeffs& coeffs,
                                const FrequencyThreshold& threshold, const Interval& iv);

/// Same multipliers as apply_stabilized, on coefficient sequences.
SpectralCoeffs apply_stabilized(const OperatorVariant& variant, const SpectralCoeffs& coeffs,
                                const FrequencyThreshold& threshold, const Interval& iv);

/// project (trapezoid) -> scale -> synthesize on the grid. Only modes
/// j <= M-1 carry information on the grid; the truncation variant further
/// restricts to the admissible set and the hybrid one to mu_j <= lambda^(1/4).
std::vector<double> apply_stabilized(const OperatorVariant& variant, std::span<const double> u,
                                     const Grid1D& grid, const FrequencyThreshold& threshold);

/// Modes the stabilized operator touches on the given grid.
std::vector<int> stabilized_modes(const OperatorVariant& variant, const Grid1D& grid,
                                  const FrequencyThreshold& threshold);

}  // namespace qrb
