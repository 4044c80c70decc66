#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qrb {

/// Open interval (a, b) carrying the Dirichlet problem.
struct Interval {
    double a = 0.0;
    double b = 0.0;

    Interval() = default;
    Interval(double left, double right);

    double length() const { return b - a; }
};

/// Uniform mesh x_m = a + m*dx, m = 0..M.
class Grid1D {
public:
    Grid1D(Interval interval, int M);

    const Interval& interval() const { return interval_; }
    int M() const { return M_; }
    double dx() const { return dx_; }
    double x(int m) const;
    std::size_t size() const { return static_cast<std::size_t>(M_) + 1; }
    std::vector<double> points() const;

private:
    Interval interval_;
    int M_;
    double dx_;
};

/// Dirichlet eigenpair of -d^2/dx^2 on an interval.
struct EigenPair {
    int j = 1;
    double mu = 0.0;
    Interval interval;

    double phi(double x) const;
};

/// Coefficients c_j = <u, phi_j>; index 0 holds mode j = 1.
struct SpectralCoeffs {
    std::vector<double> c;

    std::size_t modes() const { return c.size(); }
    double operator()(int j) const { return c[static_cast<std::size_t>(j - 1)]; }
    double& operator()(int j) { return c[static_cast<std::size_t>(j - 1)]; }
};

/// Axis-aligned box (0,a_1) x ... x (0,a_d).
struct BoxSpec {
    std::vector<double> edges;
};

using ScalarFunction = std::function<double(double)>;

double eigenvalue(int j, const Interval& iv);
EigenPair eigenpair(int j, const Interval& iv);

/// Composite Simpson on a refinement of the grid; the refinement uses at
/// least 10*M and at least 512 subintervals, and at least 128 per unit of
/// mode index.
double project(const ScalarFunction& f, int j, const Grid1D& grid);

/// Composite trapezoid on the grid samples.
double project(std::span<const double> values, int j, const Grid1D& grid);

SpectralCoeffs project_all(const ScalarFunction& f, int modes, const Grid1D& grid);
SpectralCoeffs project_all(std::span<const double> values, int modes, const Grid1D& grid);

/// x_m -> sum_j c_j phi_j(x_m); the two endpoint samples are exactly zero.
std::vector<double> synthesize(const SpectralCoeffs& coeffs, const Grid1D& grid);

/// sum_j mu_j^s c_j^2
double sobolev_norm_sq(const SpectralCoeffs& coeffs, double s, const Interval& iv);

/// The `count` smallest eigenvalues of the Dirichlet Laplacian on the box,
/// with multiplicity.
std::vector<double> box_eigenvalues(const BoxSpec& box, int count);

// Trapezoid-rule quadrature on grid samples.
double trapezoid_inner(std::span<const double> f, std::span<const double> g, const Grid1D& grid);
double trapezoid_norm_sq(std::span<const double> f, const Grid1D& grid);

std::vector<double> sample(const ScalarFunction& f, const Grid1D& grid);

}  // namespace qrb
