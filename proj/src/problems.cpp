#include "qrbackward/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrb {

namespace {

constexpr double pi = std::numbers::pi;

void check_bounds(double lower, double upper, double m1) {
    if (!(lower > 0.0 && lower <= m1 && m1 < upper)) {
        throw std::invalid_argument("diffusion bounds require 0 < Munder <= M1 < Mbar");
    }
}

double tau_windowed(double u) {
    if (u < 0.0 || u > 1.0) return 0.0;
    return std::abs(u * (1.0 - u));
}

}  // namespace

DiffusionSpec DiffusionSpec::constant(double value, double lower, double upper, double m1) {
    check_bounds(lower, upper, m1);
    // Values up to Mbar are accepted so that Dbar = Mbar - D >= 0.
    if (!(value >= lower && value <= upper)) {
        throw std::invalid_argument("constant diffusion must lie in [Munder, Mbar]");
    }
    return DiffusionSpec{Kind::Constant, value, lower, upper, m1};
}

DiffusionSpec DiffusionSpec::nonlocal(double base, double lower, double upper, double m1) {
    check_bounds(lower, upper, m1);
    if (!(base >= lower && base < upper)) {
        throw std::invalid_argument("nonlocal base rate must lie in [Munder, Mbar)");
    }
    return DiffusionSpec{Kind::Nonlocal, base, lower, upper, m1};
}

double cutoff_apply(const NonlinearitySpec& F, double ell, double x, double t, double u, double v) {
    if (!(ell > 0.0)) throw std::invalid_argument("cut-off radius must be positive");
    const double top = std::max(u, v);
    if (top > ell) return F.f(x, t, ell, ell);
    if (top < -ell) return F.f(x, t, -ell, -ell);
    return F.f(x, t, u, v);
}

double nonlocal_diffusion(std::span<const double> u, const DiffusionSpec& spec, const Grid1D& grid) {
    if (spec.kind == DiffusionSpec::Kind::Constant) return spec.value;
    if (u.size() != grid.size()) {
        throw std::invalid_argument("grid function has wrong number of samples");
    }
    double sum = 0.0;
    for (int m = 1; m < grid.M(); ++m) sum += tau_windowed(u[static_cast<std::size_t>(m)]);
    return spec.value + grid.dx() * sum;
}

double effective_diffusion(std::span<const double> u, const DiffusionSpec& spec, const Grid1D& grid) {
    return spec.upper - nonlocal_diffusion(u, spec, grid);
}

double diffusion_of_field(const FieldFunction& field, double t, const DiffusionSpec& spec,
                          const Interval& iv) {
    if (spec.kind == DiffusionSpec::Kind::Constant) return spec.value;
    constexpr int n = 4000;
    const double h = iv.length() / n;
    double sum = tau_windowed(field(iv.a, t)) + tau_windowed(field(iv.b, t));
    for (int i = 1; i < n; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * tau_windowed(field(iv.a + i * h, t));
    }
    return spec.value + h / 3.0 * sum;
}

ManufacturedCase test1() {
    ManufacturedCase c;
    c.name = "test1";
    c.interval = Interval(0.0, pi);
    c.T = 1.0;
    c.constants = {{"D1", 0.5}, {"D2", 1.0}, {"Mbar", 1.0}, {"M1", 0.75}, {"r_u", 1.0},
                   {"r_v", 1.0}, {"K_u", 1.0}, {"K_v", 1.0}, {"b_u", 2.0}, {"b_v", 0.5}};
    const auto& k = c.constants;
    c.mbar = k.at("Mbar");
    c.m1 = k.at("M1");
    const double lower = std::min(k.at("D1"), k.at("D2"));
    c.diffusion_u = DiffusionSpec::constant(k.at("D1"), lower, c.mbar, c.m1);
    c.diffusion_v = DiffusionSpec::constant(k.at("D2"), lower, c.mbar, c.m1);

    c.u.value = [](double x, double t) { return std::exp(-t) * std::sin(x); };
    c.u.dt = [](double x, double t) { return -std::exp(-t) * std::sin(x); };
    c.u.dxx = [](double x, double t) { return -std::exp(-t) * std::sin(x); };
    c.v.value = [](double x, double t) { return t * t * x * (pi - x); };
    c.v.dt = [](double x, double t) { return 2.0 * t * x * (pi - x); };
    c.v.dxx = [](double, double t) { return -2.0 * t * t; };

    const double ru = k.at("r_u"), rv = k.at("r_v"), Ku = k.at("K_u"), Kv = k.at("K_v");
    const double bu = k.at("b_u"), bv = k.at("b_v");
    auto F1 = [](double x, double t) {
        const double e = std::exp(-t);
        return e * std::sin(x) * (e * std::sin(x) + 2.0 * t * t * x * (pi - x) - 1.5);
    };
    auto F2 = [](double x, double t) {
        const double q = x * (pi - x);
        return 2.0 * t * t + t * q * (2.0 - t + t * t * t * q + t / 2.0 * std::exp(-t) * std::sin(x));
    };
    auto L = [](double ell) { return 1.0 + 3.0 * ell; };
    auto L_inv = [](double y) { return (y - 1.0) / 3.0; };
    c.F.f = [=](double x, double t, double u, double v) {
        return ru * u * (1.0 - u / Ku - bu * v / Ku) + F1(x, t);
    };
    c.G.f = [=](double x, double t, double u, double v) {
        return rv * v * (1.0 - v / Kv - bv * u / Kv) + F2(x, t);
    };
    c.F.lipschitz = c.G.lipschitz = L;
    c.F.lipschitz_inverse = c.G.lipschitz_inverse = L_inv;
    // sup |v_ex| over the space-time cylinder is pi^2/4.
    c.default_ell_floor = std::max(2.0, pi * pi / 4.0);
    return c;
}

ManufacturedCase test2() {
    ManufacturedCase c;
    c.name = "test2";
    c.interval = Interval(0.0, pi);
    c.T = 1.0;
    c.constants = {{"d1", 0.01}, {"d2", 0.05}, {"Mbar", 4.0}, {"M1", 3.5}};
    const auto& k = c.constants;
    c.mbar = k.at("Mbar");
    c.m1 = k.at("M1");
    c.diffusion_u = DiffusionSpec::nonlocal(k.at("d1"), k.at("d1"), c.mbar, c.m1);
    c.diffusion_v = DiffusionSpec::nonlocal(k.at("d2"), k.at("d2"), c.mbar, c.m1);

    c.u.value = [](double x, double t) {
        const double s = std::sin(x);
        return 0.25 * std::log(3.0 + t) * s * s;
    };
    c.u.dt = [](double x, double t) {
        const double s = std::sin(x);
        return 0.25 * s * s / (3.0 + t);
    };
    c.u.dxx = [](double x, double t) { return 0.5 * std::log(3.0 + t) * std::cos(2.0 * x); };
    c.v.value = [](double x, double t) { return t * std::sin(x); };
    c.v.dt = [](double x, double) { return std::sin(x); };
    c.v.dxx = [](double x, double t) { return -t * std::sin(x); };

    c.F.f = [](double x, double t, double, double) {
        const double lg = std::log(3.0 + t);
        const double s = std::sin(x);
        return s * s / (4.0 * (3.0 + t)) -
               (1.0 / 8.0) * (1.0 / 25.0 + pi / 2.0 * lg * (1.0 - 3.0 / 16.0 * lg)) * lg *
                   std::cos(2.0 * x);
    };
    c.G.f = [](double x, double t, double, double) {
        return (1.0 - t * (t * (pi * t - 4.0) / 2.0 - 1.0 / 20.0)) * std::sin(x);
    };
    c.F.lipschitz = c.G.lipschitz = [](double) { return 0.0; };
    c.F.state_dependent = c.G.state_dependent = false;
    c.default_ell_floor = 2.0;
    return c;
}

ManufacturedCase case_by_name(std::string_view name) {
    if (name == "test1") return test1();
    if (name == "test2") return test2();
    throw std::invalid_argument("unknown case '" + std::string(name) + "'");
}

double manufactured_residual(const ManufacturedCase& c, bool second, double x, double t) {
    const ExactField& w = second ? c.v : c.u;
    const DiffusionSpec& spec = second ? c.diffusion_v : c.diffusion_u;
    const NonlinearitySpec& S = second ? c.G : c.F;
    const double D = diffusion_of_field(w.value, t, spec, c.interval);
    return w.dt(x, t) - D * w.dxx(x, t) - S.f(x, t, c.u.value(x, t), c.v.value(x, t));
}

}  // namespace qrb
