#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qrbackward/regops.hpp"
#include "qrbackward/spectral.hpp"

using namespace qrb;
using std::numbers::pi;

namespace {

const OperatorKind kAllKinds[] = {OperatorKind::TruncationQR, OperatorKind::ClassicalQR, OperatorKind::HybridQR};

std::vector<double> phi_samples(int j, const Grid1D& g) {
    const EigenPair e = eigenpair(j, g.interval());
    return sample([&](double x) { return e.phi(x); }, g);
}

}  // namespace

TEST_CASE("operator names round trip") {
    for (OperatorKind k : kAllKinds) CHECK(parse_operator_kind(to_string(k)) == k);
    CHECK_THROWS(parse_operator_kind("spectral"));
}

TEST_CASE("variant constants") {
    const OperatorVariant t(OperatorKind::TruncationQR, 2.0), c(OperatorKind::ClassicalQR, 2.0),
        h(OperatorKind::HybridQR, 2.0);
    CHECK(t.c0bar() == 2.0);
    CHECK(c.c0bar() == 1.0);
    CHECK(h.c0bar() == 3.0);
    CHECK(t.c1() == 2.0);
    CHECK(c.c1() == 1.0);
    CHECK(h.c1() == 1.0);
    CHECK(t.source_order() == 2.0);
    CHECK(c.source_order() == 4.0);
    CHECK(h.source_order() == 2.0);
    CHECK_THROWS(OperatorVariant(OperatorKind::TruncationQR, 0.0));
}

TEST_CASE("frequency threshold") {
    // (theta - 1) ln eps / (C1 T) with theta = 0.3, p = 1
    CHECK(frequency_threshold({1e-3, 0.3, 1.0, 1.0, 1.0}).lambda == doctest::Approx(0.7 * std::log(1e3)));
    CHECK(frequency_threshold({1e-3, 0.3, 1.0, 1.0, 1.0}).lambda == doctest::Approx(4.835).epsilon(1e-3));
    CHECK(frequency_threshold({1e-5, 0.3, 1.0, 1.0, 1.0}).lambda == doctest::Approx(8.059).epsilon(1e-3));
    CHECK(frequency_threshold({1e-4, 0.3, 1.0, 4.0, 1.0}).lambda == doctest::Approx(1.612).epsilon(1e-3));
    // the -4 theta p branch wins for small theta p
    CHECK(frequency_threshold({1e-2, 0.1, 0.5, 1.0, 2.0}).lambda == doctest::Approx(-0.2 * std::log(1e-2) / 2.0));
    CHECK_THROWS(frequency_threshold({0.0, 0.3, 1.0, 1.0, 1.0}));
    CHECK_THROWS(frequency_threshold({1e-3, 1.0, 1.0, 1.0, 1.0}));
    CHECK_THROWS(frequency_threshold({1e-3, 0.3, 1.0, 0.0, 1.0}));
}

TEST_CASE("threshold grows as the noise shrinks") {
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const double l = frequency_threshold({eps, 0.3, 1.0, 1.0, 1.0}).lambda;
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("admissible sets") {
    const Interval iv(0.0, pi);
    CHECK(admissible_set({4.835}, iv) == std::vector<int>{1, 2});
    CHECK(admissible_set({8.059}, iv) == std::vector<int>{1, 2});
    CHECK(admissible_set({9.0}, iv) == std::vector<int>{1, 2, 3});
    CHECK(admissible_set({0.5}, iv).empty());
    CHECK(admissible_set({1.612}, iv) == std::vector<int>{1});
}

TEST_CASE("perturbing operator examples") {
    const Interval iv(0.0, pi);
    const OperatorVariant t(OperatorKind::TruncationQR, 1.0), c(OperatorKind::ClassicalQR, 1.0);
    CHECK(apply_perturbing(t, SpectralCoeffs{{1.0}}, {4.835}, iv)(1) == 0.0);
    CHECK(apply_perturbing(t, SpectralCoeffs{{0.0, 0.0, 1.0}}, {4.835}, iv)(3) == doctest::Approx(9.0));
    CHECK(apply_perturbing(c, SpectralCoeffs{{0.0, 1.0}}, {4.0}, iv)(2) == doctest::Approx(1.0));
}

TEST_CASE("stabilized operator on grid functions") {
    const Grid1D g(Interval(0.0, pi), 15);
    const OperatorVariant t(OperatorKind::TruncationQR, 1.0);
    const FrequencyThreshold th{4.835};
    const auto p1 = phi_samples(1, g), p2 = phi_samples(2, g), p3 = phi_samples(3, g);

    const auto a = apply_stabilized(t, p1, g, th);
    const auto b = apply_stabilized(t, p3, g, th);
    std::vector<double> sum(g.size());
    for (std::size_t m = 0; m < sum.size(); ++m) sum[m] = p1[m] + p2[m];
    const auto c = apply_stabilized(t, sum, g, th);
    for (std::size_t m = 0; m < g.size(); ++m) {
        CHECK(a[m] == doctest::Approx(-p1[m]).epsilon(1e-12).scale(1.0));
        CHECK(std::abs(b[m]) < 1e-12);
        CHECK(c[m] == doctest::Approx(-(p1[m] + 4.0 * p2[m])).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("stabilized modes respect the grid and the variant") {
    const Grid1D g(Interval(0.0, pi), 15);
    CHECK(stabilized_modes(OperatorVariant(OperatorKind::TruncationQR, 1.0), g, {4.835}) == std::vector<int>{1, 2});
    CHECK(stabilized_modes(OperatorVariant(OperatorKind::ClassicalQR, 1.0), g, {4.835}).size() == 14);
    // lambda^(1/4) = 2 admits mu = 1 only
    CHECK(stabilized_modes(OperatorVariant(OperatorKind::HybridQR, 1.0), g, {16.0}) == std::vector<int>{1});
    CHECK_THROWS(stabilized_modes(OperatorVariant(OperatorKind::ClassicalQR, 1.0), g, {0.0}));
}

TEST_CASE("every variant splits as P = Qbar - Mbar mu") {
    for (OperatorKind k : kAllKinds) {
        for (double mbar : {0.5, 1.0, 4.0}) {
            const OperatorVariant v(k, mbar);
            for (double lambda : {0.7, 4.835, 50.0}) {
                for (double mu = 0.25; mu < 400.0; mu *= 1.37) {
                    const double lhs = stabilized_multiplier(v, mu, lambda);
                    const double rhs = perturbing_multiplier(v, mu, lambda) - mbar * mu;
                    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(mbar * mu));
                }
            }
        }
    }
}

TEST_CASE("grid and coefficient application agree, and are linear") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const Grid1D g(Interval(0.0, 2.0), 20);
    for (OperatorKind k : kAllKinds) {
        const OperatorVariant v(k, 1.3);
        const FrequencyThreshold th{30.0};
        SpectralCoeffs a, b;
        for (int j = 1; j < g.M(); ++j) {
            a.c.push_back(nd(rng));
            b.c.push_back(nd(rng));
        }
        const auto ua = synthesize(a, g), ub = synthesize(b, g);
        const auto via_coeffs = synthesize(apply_stabilized(v, a, th, g.interval()), g);
        const auto via_grid = apply_stabilized(v, ua, g, th);
        for (std::size_t m = 0; m < g.size(); ++m)
            CHECK(via_grid[m] == doctest::Approx(via_coeffs[m]).epsilon(1e-9).scale(1.0));

        std::vector<double> combo(g.size());
        for (std::size_t m = 0; m < combo.size(); ++m) combo[m] = 2.0 * ua[m] - 0.5 * ub[m];
        const auto pa = apply_stabilized(v, ua, g, th), pb = apply_stabilized(v, ub, g, th);
        const auto pc = apply_stabilized(v, combo, g, th);
        for (std::size_t m = 0; m < g.size(); ++m)
            CHECK(pc[m] == doctest::Approx(2.0 * pa[m] - 0.5 * pb[m]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("stabilized bound for truncation and hybrid on random sequences") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> decay(0.0, 3.0);
    const Interval iv(0.0, pi);
    for (OperatorKind k : {OperatorKind::TruncationQR, OperatorKind::HybridQR}) {
        const OperatorVariant v(k, 1.0);
        for (double lambda : {4.835, 6.447, 8.059}) {
            for (int s = 0; s < 100; ++s) {
                const double r = decay(rng);
                SpectralCoeffs c;
                for (int j = 1; j <= 14; ++j) c.c.push_back(nd(rng) * std::pow(j, -r));
                const auto pc = apply_stabilized(v, c, {lambda}, iv);
                double nu = 0.0, np = 0.0;
                for (std::size_t i = 0; i < c.c.size(); ++i) {
                    nu += c.c[i] * c.c[i];
                    np += pc.c[i] * pc.c[i];
                }
                CHECK(std::sqrt(np) <= v.c1() * lambda * std::sqrt(nu) + 1e-8);
            }
        }
    }
}

TEST_CASE("classical stabilized operator is bounded from one side only") {
    const OperatorVariant c(OperatorKind::ClassicalQR, 1.0);
    const double lambda = 4.835;
    // <P u, u> >= -lambda ||u||^2 holds for every mode
    for (double mu = 0.1; mu < 1e4; mu *= 1.1) CHECK(stabilized_multiplier(c, mu, lambda) >= -lambda - 1e-12);
    // while |P| exceeds lambda once mu > 2 lambda (1 + sqrt 2) / Mbar
    const double mu_star = 2.0 * lambda * (1.0 + std::sqrt(2.0));
    CHECK(std::abs(stabilized_multiplier(c, 0.99 * mu_star, lambda)) <= lambda);
    CHECK(std::abs(stabilized_multiplier(c, 1.01 * mu_star, lambda)) > lambda);
}
