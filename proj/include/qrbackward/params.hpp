#pragma once

#include "qrbackward/problems.hpp"
#include "qrbackward/regops.hpp"

namespace qrb {

/// Every epsilon-driven regularization choice. Immutable once selected.
struct RegParams {
    double epsilon = 0.0;
    double theta = 0.0;
    double p = 0.0;
    double T = 0.0;
    double C1 = 0.0;
    double beta = 0.0;            // = epsilon
    int n = 0;                    // floor(eps^(-2 theta))
    double exponent = 0.0;        // max{theta - 1, -4 theta p}
    double lambda = 0.0;          // log gamma(T, beta)
    double t_eps = 0.0;
    double kappa_eps = 0.0;       // min(C1 t_eps, 0.999)
    bool kappa_eps_capped = false;
    double ell_floor = 0.0;

    double gamma(double t) const;  // eps^((t / (C1 T^2)) * exponent)
    double kappa(double t) const { return C1 * t; }
    FrequencyThreshold threshold() const { return FrequencyThreshold{lambda}; }
};

RegParams select_params(double epsilon, double theta, double p, double T, double C1,
                        double ell_floor);

/// Observation count floor(eps^(-2 theta)), robust to the rounding of exact
/// powers (eps = 1e-5, theta = 0.3 gives 1000, not 999).
int observation_count(double epsilon, double theta);

/// Root of ln t + c t = 0 in (0, T), c = (-exponent / T) ln(1/eps), by bisection.
double solve_t_eps(double epsilon, double theta, double p, double T);

struct CutoffRadius {
    double value = 0.0;    // radius actually used
    double formula = 0.0;  // L^{-1}(kappa(t) ln(lambda) / (8 (T - t)))
    bool clamped = false;
    bool unbounded = false;  // no cut-off: the source is state independent
};

/// ell^eps(t) from the inverted Lipschitz profile, clamped below by ell_floor.
CutoffRadius cutoff_radius(double t, const RegParams& params, const NonlinearitySpec& source);

/// Shape of the error bound: eps^((2t/T) min{1-theta, 4 theta p}) lambda^kappa(t)
/// for t > 0 and lambda^(kappa_eps - 1) at t = 0.
double predicted_rate(double t, const RegParams& params);

}  // namespace qrb
