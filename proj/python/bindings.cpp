#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "qrbackward/harness.hpp"
#include "qrbackward/params.hpp"
#include "qrbackward/problems.hpp"
#include "qrbackward/regops.hpp"
#include "qrbackward/solver.hpp"
#include "qrbackward/spectral.hpp"
#include "qrbackward/statdata.hpp"

namespace py = pybind11;

namespace {

qrb::SpectralCoeffs coeffs(std::vector<double> c) { return qrb::SpectralCoeffs{std::move(c)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quasi-reversibility regularization of backward reaction-diffusion systems";

    py::register_exception<qrb::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<qrb::DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    py::class_<qrb::Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
        .def_readonly("a", &qrb::Interval::a)
        .def_readonly("b", &qrb::Interval::b)
        .def("length", &qrb::Interval::length);

    py::class_<qrb::Grid1D>(m, "Grid1D")
        .def(py::init<qrb::Interval, int>(), py::arg("interval"), py::arg("M"))
        .def_property_readonly("M", &qrb::Grid1D::M)
        .def_property_readonly("dx", &qrb::Grid1D::dx)
        .def_property_readonly("interval", &qrb::Grid1D::interval)
        .def("points", &qrb::Grid1D::points);

    py::class_<qrb::EigenPair>(m, "EigenPair")
        .def_readonly("j", &qrb::EigenPair::j)
        .def_readonly("mu", &qrb::EigenPair::mu)
        .def("phi", &qrb::EigenPair::phi, py::arg("x"));

    m.def("eigenpair", &qrb::eigenpair, py::arg("j"), py::arg("interval"));
    m.def("project",
          [](const std::vector<double>& values, int j, const qrb::Grid1D& g) { return qrb::project(values, j, g); },
          py::arg("values"), py::arg("j"), py::arg("grid"));
    m.def("project_function",
          [](const std::function<double(double)>& f, int j, const qrb::Grid1D& g) { return qrb::project(f, j, g); },
          py::arg("f"), py::arg("j"), py::arg("grid"));
    m.def("synthesize", [](std::vector<double> c, const qrb::Grid1D& g) { return qrb::synthesize(coeffs(std::move(c)), g); },
          py::arg("coeffs"), py::arg("grid"));
    m.def("sobolev_norm_sq",
          [](std::vector<double> c, double s, const qrb::Interval& iv) {
              return qrb::sobolev_norm_sq(coeffs(std::move(c)), s, iv);
          },
          py::arg("coeffs"), py::arg("s"), py::arg("interval"));
    m.def("box_eigenvalues",
          [](std::vector<double> edges, int count) { return qrb::box_eigenvalues(qrb::BoxSpec{std::move(edges)}, count); },
          py::arg("edges"), py::arg("count"));

    py::class_<qrb::ObservationSet>(m, "ObservationSet")
        .def_readonly("epsilon", &qrb::ObservationSet::epsilon)
        .def_readonly("n", &qrb::ObservationSet::n)
        .def_readonly("seed", &qrb::ObservationSet::seed)
        .def_property_readonly("u_obs", [](const qrb::ObservationSet& o) { return o.u_obs.c; })
        .def_property_readonly("v_obs", [](const qrb::ObservationSet& o) { return o.v_obs.c; });

    m.def("observe",
          [](std::vector<double> u, std::vector<double> v, double eps, std::uint64_t seed, int n) {
              return qrb::observe(coeffs(std::move(u)), coeffs(std::move(v)), qrb::NoiseModel(eps, seed), n);
          },
          py::arg("true_u"), py::arg("true_v"), py::arg("epsilon"), py::arg("seed"), py::arg("n"));
    m.def("reconstruct", &qrb::reconstruct, py::arg("obs"), py::arg("grid"));
    m.def("mse_bound", &qrb::mse_bound, py::arg("epsilon"), py::arg("n"), py::arg("sobolev_norm_sq_2p"),
          py::arg("mu_n"), py::arg("p"));
    m.def("empirical_mse",
          [](const std::vector<double>& uf, const qrb::Grid1D& g, double eps, int n, int samples, std::uint64_t seed) {
              const qrb::MseEstimate e = qrb::empirical_mse(uf, g, eps, n, samples, seed);
              return py::make_tuple(e.mean, e.std_error);
          },
          py::arg("true_uf"), py::arg("grid"), py::arg("epsilon"), py::arg("n"), py::arg("samples"),
          py::arg("base_seed"));

    m.def("frequency_threshold",
          [](double eps, double theta, double p, double C1, double T) {
              return qrb::frequency_threshold({eps, theta, p, C1, T}).lambda;
          },
          py::arg("epsilon"), py::arg("theta"), py::arg("p"), py::arg("C1"), py::arg("T"));
    m.def("admissible_set",
          [](double lambda, const qrb::Interval& iv) { return qrb::admissible_set({lambda}, iv); },
          py::arg("lambda_"), py::arg("interval"));
    m.def("apply_stabilized",
          [](const std::string& kind, double mbar, const std::vector<double>& u, const qrb::Grid1D& g, double lambda) {
              return qrb::apply_stabilized(qrb::OperatorVariant(qrb::parse_operator_kind(kind), mbar), u, g, {lambda});
          },
          py::arg("kind"), py::arg("mbar"), py::arg("u"), py::arg("grid"), py::arg("lambda_"));
    m.def("apply_perturbing",
          [](const std::string& kind, double mbar, std::vector<double> c, double lambda, const qrb::Interval& iv) {
              return qrb::apply_perturbing(qrb::OperatorVariant(qrb::parse_operator_kind(kind), mbar),
                                           coeffs(std::move(c)), {lambda}, iv)
                  .c;
          },
          py::arg("kind"), py::arg("mbar"), py::arg("coeffs"), py::arg("lambda_"), py::arg("interval"));

    py::class_<qrb::RegParams>(m, "RegParams")
        .def_readonly("epsilon", &qrb::RegParams::epsilon)
        .def_readonly("theta", &qrb::RegParams::theta)
        .def_readonly("p", &qrb::RegParams::p)
        .def_readonly("T", &qrb::RegParams::T)
        .def_readonly("C1", &qrb::RegParams::C1)
        .def_readonly("beta", &qrb::RegParams::beta)
        .def_readonly("n", &qrb::RegParams::n)
        .def_readonly("exponent", &qrb::RegParams::exponent)
        .def_readonly("lambda_", &qrb::RegParams::lambda)
        .def_readonly("t_eps", &qrb::RegParams::t_eps)
        .def_readonly("kappa_eps", &qrb::RegParams::kappa_eps)
        .def_readonly("ell_floor", &qrb::RegParams::ell_floor)
        .def("gamma", &qrb::RegParams::gamma)
        .def("kappa", &qrb::RegParams::kappa);

    m.def("select_params", &qrb::select_params, py::arg("epsilon"), py::arg("theta"), py::arg("p"), py::arg("T"),
          py::arg("C1"), py::arg("ell_floor"));
    m.def("solve_t_eps", &qrb::solve_t_eps, py::arg("epsilon"), py::arg("theta"), py::arg("p"), py::arg("T"));
    m.def("predicted_rate", &qrb::predicted_rate, py::arg("t"), py::arg("params"));
    m.def("cutoff_radius",
          [](double t, const qrb::RegParams& params, const std::string& case_name) {
              const qrb::CutoffRadius r = qrb::cutoff_radius(t, params, qrb::case_by_name(case_name).F);
              return py::make_tuple(r.value, r.formula, r.clamped);
          },
          py::arg("t"), py::arg("params"), py::arg("case"));

    m.def("exact_solution",
          [](const std::string& case_name, const std::string& species, double x, double t) {
              const qrb::ManufacturedCase c = qrb::case_by_name(case_name);
              if (species == "u") return c.u.value(x, t);
              if (species == "v") return c.v.value(x, t);
              throw std::invalid_argument("species must be 'u' or 'v'");
          },
          py::arg("case"), py::arg("species"), py::arg("x"), py::arg("t"));
    m.def("manufactured_residual",
          [](const std::string& case_name, bool second, double x, double t) {
              return qrb::manufactured_residual(qrb::case_by_name(case_name), second, x, t);
          },
          py::arg("case"), py::arg("second"), py::arg("x"), py::arg("t"));

    m.def("pick_time_index",
          [](double t_eps, int M, int K, double T) {
              return qrb::pick_time_index(t_eps, qrb::SchemeConfig(qrb::Grid1D({0.0, 1.0}, M), K, T));
          },
          py::arg("t_eps"), py::arg("M"), py::arg("K"), py::arg("T"));

    m.def("solve_backward",
          [](const std::string& case_name, std::vector<double> u, std::vector<double> v, const qrb::RegParams& params,
             int M, int K, const std::string& op) {
              const qrb::ManufacturedCase c = qrb::case_by_name(case_name);
              const qrb::SchemeConfig cfg(qrb::Grid1D(c.interval, M), K, c.T);
              const qrb::Trajectory traj = qrb::solve_backward({std::move(u), std::move(v)}, c, params, cfg,
                                                               qrb::OperatorVariant(qrb::parse_operator_kind(op), c.mbar));
              std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
              for (const auto& s : traj.levels) out.emplace_back(s.u, s.v);
              return out;
          },
          py::arg("case"), py::arg("terminal_u"), py::arg("terminal_v"), py::arg("params"), py::arg("M"),
          py::arg("K"), py::arg("operator") = "truncation");

    m.def("run_sample_json",
          [](const std::string& config, double eps, int index) {
              const qrb::SampleError s =
                  qrb::run_sample(qrb::ExperimentConfig::from_json(nlohmann::json::parse(config)), eps, index);
              return nlohmann::json{{"index", s.index}, {"err_u", s.err_u}, {"err_v", s.err_v}, {"ok", s.ok},
                                    {"message", s.message}}
                  .dump();
          },
          py::arg("config"), py::arg("epsilon"), py::arg("index"));
    m.def("run_experiment_json",
          [](const std::string& config) {
              qrb::ExperimentConfig cfg = qrb::ExperimentConfig::from_json(nlohmann::json::parse(config));
              qrb::ErrorReport report;
              {
                  py::gil_scoped_release release;
                  report = qrb::run_experiment(cfg);
              }
              qrb::emit(report);
              return qrb::report_to_json(report).dump();
          },
          py::arg("config"));
}
