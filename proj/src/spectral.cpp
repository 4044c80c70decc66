#include "qrbackward/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace qrb {

namespace {

void check_mode(int j) {
    if (j < 1) {
        throw std::invalid_argument("mode index must be >= 1, got " + std::to_string(j));
    }
}

void check_length(std::span<const double> values, const Grid1D& grid) {
    if (values.size() != grid.size()) {
        throw std::invalid_argument("grid function has " + std::to_string(values.size()) +
                                    " samples, expected " + std::to_string(grid.size()));
    }
}

}  // namespace

Interval::Interval(double left, double right) : a(left), b(right) {
    if (!(left < right)) {
        throw std::invalid_argument("interval requires a < b");
    }
}

Grid1D::Grid1D(Interval interval, int M) : interval_(interval), M_(M) {
    if (M < 2) {
        throw std::invalid_argument("grid requires M >= 2, got " + std::to_string(M));
    }
    dx_ = interval_.length() / M_;
}

double Grid1D::x(int m) const {
    if (m == M_) return interval_.b;
    return interval_.a + m * dx_;
}

std::vector<double> Grid1D::points() const {
    std::vector<double> xs(size());
    for (int m = 0; m <= M_; ++m) xs[static_cast<std::size_t>(m)] = x(m);
    return xs;
}

double EigenPair::phi(double x) const {
    const double len = interval.length();
    return std::sqrt(2.0 / len) * std::sin(j * std::numbers::pi * (x - interval.a) / len);
}

double eigenvalue(int j, const Interval& iv) {
    check_mode(j);
    const double k = j * std::numbers::pi / iv.length();
    return k * k;
}

EigenPair eigenpair(int j, const Interval& iv) {
    return EigenPair{j, eigenvalue(j, iv), iv};
}

double project(const ScalarFunction& f, int j, const Grid1D& grid) {
    check_mode(j);
    const EigenPair e = eigenpair(j, grid.interval());
    int n = std::max({10 * grid.M(), 128 * j, 512});
    if (n % 2 != 0) ++n;
    const double a = grid.interval().a;
    const double h = grid.interval().length() / n;
    // Endpoint terms vanish because phi_j does.
    double odd = 0.0;
    double even = 0.0;
    for (int i = 1; i < n; ++i) {
        const double x = a + i * h;
        const double v = f(x) * e.phi(x);
        if (i % 2 == 1) {
            odd += v;
        } else {
            even += v;
        }
    }
    return h / 3.0 * (4.0 * odd + 2.0 * even);
}

double project(std::span<const double> values, int j, const Grid1D& grid) {
    check_mode(j);
    check_length(values, grid);
    const EigenPair e = eigenpair(j, grid.interval());
    double sum = 0.0;
    for (int m = 1; m < grid.M(); ++m) {
        sum += values[static_cast<std::size_t>(m)] * e.phi(grid.x(m));
    }
    return grid.dx() * sum;
}

SpectralCoeffs project_all(const ScalarFunction& f, int modes, const Grid1D& grid) {
    SpectralCoeffs out;
    out.c.reserve(static_cast<std::size_t>(std::max(modes, 0)));
    for (int j = 1; j <= modes; ++j) out.c.push_back(project(f, j, grid));
    return out;
}

SpectralCoeffs project_all(std::span<const double> values, int modes, const Grid1D& grid) {
    SpectralCoeffs out;
    out.c.reserve(static_cast<std::size_t>(std::max(modes, 0)));
    for (int j = 1; j <= modes; ++j) out.c.push_back(project(values, j, grid));
    return out;
}

std::vector<double> synthesize(const SpectralCoeffs& coeffs, const Grid1D& grid) {
    std::vector<double> out(grid.size(), 0.0);
    const double scale = std::sqrt(2.0 / grid.interval().length());
    const double step = std::numbers::pi / grid.M();
    for (int m = 1; m < grid.M(); ++m) {
        // sin(j*theta) by the three-term recurrence.
        const double theta = m * step;
        const double two_cos = 2.0 * std::cos(theta);
        double s_prev = 0.0;
        double s_cur = std::sin(theta);
        double acc = 0.0;
        for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
            acc += coeffs.c[k] * s_cur;
            const double s_next = two_cos * s_cur - s_prev;
            s_prev = s_cur;
            s_cur = s_next;
        }
        out[static_cast<std::size_t>(m)] = scale * acc;
    }
    return out;
}

double sobolev_norm_sq(const SpectralCoeffs& coeffs, double s, const Interval& iv) {
    if (s < 0.0) throw std::invalid_argument("smoothness order must be >= 0");
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
        const double mu = eigenvalue(static_cast<int>(k) + 1, iv);
        sum += std::pow(mu, s) * coeffs.c[k] * coeffs.c[k];
    }
    return sum;
}

std::vector<double> box_eigenvalues(const BoxSpec& box, int count) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    if (box.edges.empty()) throw std::invalid_argument("box needs at least one edge");
    for (double e : box.edges) {
        if (!(e > 0.0)) throw std::invalid_argument("box edges must be positive");
    }
    using Index = std::vector<int>;
    auto value = [&](const Index& l) {
        double s = 0.0;
        for (std::size_t i = 0; i < l.size(); ++i) {
            const double k = std::numbers::pi * l[i] / box.edges[i];
            s += k * k;
        }
        return s;
    };
    using Entry = std::pair<double, Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::set<Index> seen;
    const Index start(box.edges.size(), 1);
    frontier.emplace(value(start), start);
    seen.insert(start);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        auto [mu, l] = frontier.top();
        frontier.pop();
        out.push_back(mu);
        for (std::size_t i = 0; i < l.size(); ++i) {
            Index next = l;
            ++next[i];
            if (seen.insert(next).second) frontier.emplace(value(next), next);
        }
    }
    return out;
}

double trapezoid_inner(std::span<const double> f, std::span<const double> g, const Grid1D& grid) {
    check_length(f, grid);
    check_length(g, grid);
    const std::size_t last = grid.size() - 1;
    double sum = 0.5 * (f[0] * g[0] + f[last] * g[last]);
    for (std::size_t m = 1; m < last; ++m) sum += f[m] * g[m];
    return grid.dx() * sum;
}

double trapezoid_norm_sq(std::span<const double> f, const Grid1D& grid) {
    return trapezoid_inner(f, f, grid);
}

std::vector<double> sample(const ScalarFunction& f, const Grid1D& grid) {
    std::vector<double> out(grid.size());
    for (int m = 0; m <= grid.M(); ++m) out[static_cast<std::size_t>(m)] = f(grid.x(m));
    return out;
}

}  // namespace qrb
