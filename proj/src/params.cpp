#include "qrbackward/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qrb {

namespace {

double exponent_of(double theta, double p) {
    return std::max(theta - 1.0, -4.0 * theta * p);
}

void check_common(double epsilon, double theta, double p, double T) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
}

}  // namespace

double RegParams::gamma(double t) const {
    return std::pow(epsilon, t / (C1 * T * T) * exponent);
}

int observation_count(double epsilon, double theta) {
    const double raw = std::pow(epsilon, -2.0 * theta);
    const double nearest = std::round(raw);
    const double n = std::abs(raw - nearest) <= 1e-9 * raw ? nearest : std::floor(raw);
    return std::max(1, static_cast<int>(n));
}

double solve_t_eps(double epsilon, double theta, double p, double T) {
    check_common(epsilon, theta, p, T);
    const double c = -exponent_of(theta, p) / T * std::log(1.0 / epsilon);
    if (!(c > 0.0)) throw std::domain_error("t_eps equation needs c > 0");
    auto g = [c](double t) { return std::log(t) + c * t; };
    double lo = std::numeric_limits<double>::epsilon();
    double hi = T;
    if (!(g(hi) > 0.0)) throw std::domain_error("t_eps equation has no root in (0, T)");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < 1e-13 || mid == lo || mid == hi) break;
        if (gm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

RegParams select_params(double epsilon, double theta, double p, double T, double C1,
                        double ell_floor) {
    check_common(epsilon, theta, p, T);
    if (!(C1 > 0.0)) throw std::invalid_argument("C1 must be positive");
    if (!(ell_floor > 0.0)) throw std::invalid_argument("ell_floor must be positive");
    RegParams r;
    r.epsilon = epsilon;
    r.theta = theta;
    r.p = p;
    r.T = T;
    r.C1 = C1;
    r.beta = epsilon;
    r.n = observation_count(epsilon, theta);
    r.exponent = exponent_of(theta, p);
    r.lambda = frequency_threshold({epsilon, theta, p, C1, T}).lambda;
    r.t_eps = solve_t_eps(epsilon, theta, p, T);
    r.kappa_eps = C1 * r.t_eps;
    if (r.kappa_eps >= 0.999) {
        r.kappa_eps = 0.999;
        r.kappa_eps_capped = true;
    }
    r.ell_floor = ell_floor;
    return r;
}

CutoffRadius cutoff_radius(double t, const RegParams& params, const NonlinearitySpec& source) {
    if (!(t < params.T)) throw std::invalid_argument("cut-off radius needs t < T");
    CutoffRadius out;
    if (!source.state_dependent || !source.lipschitz_inverse) {
        out.value = out.formula = std::numeric_limits<double>::infinity();
        out.unbounded = true;
        return out;
    }
    if (!(params.lambda > 1.0)) throw std::domain_error("cut-off radius needs lambda > 1");
    const double bound = params.kappa(t) * std::log(params.lambda) / (8.0 * (params.T - t));
    out.formula = source.lipschitz_inverse(bound);
    out.clamped = out.formula < params.ell_floor;
    out.value = out.clamped ? params.ell_floor : out.formula;
    return out;
}

double predicted_rate(double t, const RegParams& params) {
    if (t < 0.0 || t > params.T) throw std::invalid_argument("t must lie in [0, T]");
    if (t == 0.0) return std::pow(params.lambda, params.kappa_eps - 1.0);
    const double rate = 2.0 * t / params.T * std::min(1.0 - params.theta, 4.0 * params.theta * params.p);
    return std::pow(params.epsilon, rate) * std::pow(params.lambda, params.kappa(t));
}

}  // namespace qrb
