#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrbackward/spectral.hpp"

namespace qrb {

/// Diffusion coefficient D_i: either a constant or
/// D(u)(t) = base + integral over {u in [0,1]} of |u(1-u)| dx.
struct DiffusionSpec {
    enum class Kind { Constant, Nonlocal };

    Kind kind = Kind::Constant;
    double value = 0.0;  // constant value, or the base rate d_i for Nonlocal
    double lower = 0.0;  // Munder
    double upper = 0.0;  // Mbar
    double m1 = 0.0;     // essential sup, Dbar in (Mbar - M1, Mbar)

    static DiffusionSpec constant(double value, double lower, double upper, double m1);
    static DiffusionSpec nonlocal(double base, double lower, double upper, double m1);
};

using SourceFunction = std::function<double(double x, double t, double u, double v)>;
using ProfileFunction = std::function<double(double)>;

/// A reaction term together with its local Lipschitz profile L(ell).
/// `lipschitz_inverse` is empty when the term does not depend on (u, v).
struct NonlinearitySpec {
    SourceFunction f;
    ProfileFunction lipschitz;
    ProfileFunction lipschitz_inverse;
    bool state_dependent = true;
};

using FieldFunction = std::function<double(double x, double t)>;

/// Exact solution and its derivatives, used for terminal data, error
/// metrics and residual checks.
struct ExactField {
    FieldFunction value;
    FieldFunction dt;
    FieldFunction dxx;
};

struct ManufacturedCase {
    std::string name;
    Interval interval;
    double T = 1.0;
    ExactField u;
    ExactField v;
    DiffusionSpec diffusion_u;
    DiffusionSpec diffusion_v;
    NonlinearitySpec F;
    NonlinearitySpec G;
    double mbar = 1.0;
    double m1 = 0.0;
    double default_ell_floor = 2.0;
    std::map<std::string, double> constants;

    double u_final(double x) const { return u.value(x, T); }
    double v_final(double x) const { return v.value(x, T); }
};

/// Three-branch cut-off on max{u, v}.
double cutoff_apply(const NonlinearitySpec& F, double ell, double x, double t, double u, double v);

/// Midpoint-rule nonlocal coefficient on grid samples (constant specs return
/// their value).
double nonlocal_diffusion(std::span<const double> u, const DiffusionSpec& spec, const Grid1D& grid);

/// Mbar - D
double effective_diffusion(std::span<const double> u, const DiffusionSpec& spec, const Grid1D& grid);

/// D evaluated on a continuous field at time t by fine composite Simpson.
double diffusion_of_field(const FieldFunction& field, double t, const DiffusionSpec& spec,
                          const Interval& iv);

ManufacturedCase test1();
ManufacturedCase test2();
ManufacturedCase case_by_name(std::string_view name);

/// PDE residual w_t - D(w) w_xx - S(x,t;u,v) of a manufactured case at (x,t),
/// first species when `second` is false.
double manufactured_residual(const ManufacturedCase& c, bool second, double x, double t);

}  // namespace qrb
