#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qrbackward/params.hpp"
#include "qrbackward/problems.hpp"

using namespace qrb;

namespace {

// Dense scan oracle for the root of ln t + c t on (0, T].
double scan_root(double c, double T) {
    const int N = 2'000'000;
    double prev_t = T / N, prev = std::log(prev_t) + c * prev_t;
    for (int i = 2; i <= N; ++i) {
        const double t = T * i / N, g = std::log(t) + c * t;
        if (prev < 0.0 && g >= 0.0) return prev_t + (t - prev_t) * (-prev) / (g - prev);
        prev_t = t;
        prev = g;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TEST_CASE("observation counts") {
    CHECK(observation_count(1e-3, 0.3) == 63);
    CHECK(observation_count(1e-4, 0.3) == 251);
    CHECK(observation_count(1e-5, 0.3) == 1000);
    CHECK(observation_count(0.5, 0.1) == 1);
    CHECK(observation_count(1e-2, 0.5) == 100);
}

TEST_CASE("exponent and threshold recorded in the parameters") {
    const RegParams r = select_params(1e-3, 0.3, 1.0, 1.0, 1.0, 2.0);
    CHECK(r.exponent == doctest::Approx(-0.7));
    CHECK(r.beta == r.epsilon);
    CHECK(r.n == 63);
    CHECK(r.lambda == doctest::Approx(4.835).epsilon(1e-3));
    // lambda = log gamma(T)
    CHECK(std::log(r.gamma(r.T)) == doctest::Approx(r.lambda).epsilon(1e-12));
    CHECK(r.kappa(0.5) == 0.5);
    CHECK_THROWS(select_params(1e-3, 0.3, 1.0, 1.0, 1.0, 0.0));
    CHECK_THROWS(select_params(1.5, 0.3, 1.0, 1.0, 1.0, 1.0));
}

TEST_CASE("reconstruction time") {
    const double t3 = solve_t_eps(1e-3, 0.3, 1.0, 1.0);
    const double t4 = solve_t_eps(1e-4, 0.3, 1.0, 1.0);
    const double t5 = solve_t_eps(1e-5, 0.3, 1.0, 1.0);
    CHECK(t3 == doctest::Approx(0.270).epsilon(2e-3));
    CHECK(t4 == doctest::Approx(0.229).epsilon(2e-3));
    const double c3 = 0.7 * std::log(1e3), c4 = 0.7 * std::log(1e4);
    CHECK(std::abs(std::log(t3) + c3 * t3) < 1e-12);
    CHECK(std::abs(std::log(t4) + c4 * t4) < 1e-12);
    CHECK(t3 == doctest::Approx(scan_root(c3, 1.0)).epsilon(1e-6));
    CHECK(t4 == doctest::Approx(scan_root(c4, 1.0)).epsilon(1e-6));
    CHECK(t5 < t4);
    CHECK(t4 < t3);
    // C1 plays no part in t_eps
    CHECK(select_params(1e-4, 0.3, 1.0, 1.0, 4.0, 2.0).t_eps == t4);
}

TEST_CASE("kappa cap") {
    const RegParams a = select_params(1e-3, 0.3, 1.0, 1.0, 1.0, 2.0);
    CHECK_FALSE(a.kappa_eps_capped);
    CHECK(a.kappa_eps == doctest::Approx(a.t_eps));
    const RegParams b = select_params(1e-3, 0.3, 1.0, 1.0, 3.0, 2.0);
    CHECK_FALSE(b.kappa_eps_capped);
    CHECK(b.kappa_eps == doctest::Approx(3.0 * b.t_eps));
    const RegParams c = select_params(1e-3, 0.3, 1.0, 1.0, 10.0, 2.0);
    CHECK(c.kappa_eps_capped);
    CHECK(c.kappa_eps == 0.999);
}

TEST_CASE("cut-off radius") {
    const auto c1 = test1();
    const RegParams r = select_params(1e-5, 0.3, 1.0, 1.0, 1.0, c1.default_ell_floor);
    const auto at09 = cutoff_radius(0.9, r, c1.F);
    CHECK(at09.formula == doctest::Approx(0.449).epsilon(2e-3));
    CHECK(at09.clamped);
    CHECK(at09.value == r.ell_floor);
    const auto at05 = cutoff_radius(0.5, r, c1.F);
    CHECK(at05.formula == doctest::Approx(-0.246).epsilon(3e-3));
    CHECK(at05.clamped);

    // L^{-1}(kappa ln lambda / (8 (T - t))) by hand
    const double t = 0.97;
    const double y = t * std::log(r.lambda) / (8.0 * 0.03);
    CHECK(cutoff_radius(t, r, c1.F).formula == doctest::Approx((y - 1.0) / 3.0));

    double prev = -1e300;
    for (double s : {0.9, 0.99, 0.999, 0.9999, 0.99999}) {
        const auto cr = cutoff_radius(s, r, c1.F);
        CHECK(cr.formula > prev);
        prev = cr.formula;
    }
    CHECK(prev > 1e3);
    CHECK_FALSE(cutoff_radius(0.99999, r, c1.F).clamped);
    CHECK_THROWS(cutoff_radius(1.0, r, c1.F));

    const auto c2 = test2();
    const RegParams r2 = select_params(1e-4, 0.3, 1.0, 1.0, 1.0, 2.0);
    CHECK(cutoff_radius(0.5, r2, c2.F).unbounded);
}

TEST_CASE("predicted rate") {
    const RegParams r = select_params(1e-3, 0.3, 1.0, 1.0, 1.0, 2.0);
    CHECK(predicted_rate(1.0, r) == doctest::Approx(std::pow(1e-3, 1.4) * std::pow(r.lambda, 1.0)));
    CHECK(predicted_rate(0.0, r) == doctest::Approx(std::pow(r.lambda, r.kappa_eps - 1.0)));
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const double v = predicted_rate(0.0, select_params(eps, 0.3, 1.0, 1.0, 1.0, 2.0));
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS(predicted_rate(1.5, r));
}
