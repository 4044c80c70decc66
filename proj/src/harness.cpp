#include "qrbackward/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "qrbackward/statdata.hpp"
#include "svg_plot.hpp"

namespace qrb {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("/") + key, std::string("missing field '") + key + "'");
    return j.at(key);
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number at " + path);
    return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer at " + path);
    return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string at " + path);
    return v.get<std::string>();
}

// Neumaier's compensated sum in index order.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace

void ExperimentConfig::validate() const {
    if (case_name != "test1" && case_name != "test2") throw ConfigError("/case", "case must be test1 or test2");
    if (M < 2) throw ConfigError("/M", "M must be >= 2");
    if (K < 2) throw ConfigError("/K", "K must be >= 2");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) {
            throw ConfigError("/epsilons/" + std::to_string(i), "epsilon must lie in (0, 1)");
        }
    }
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("/theta", "theta must lie in (0, 1)");
    if (!(p > 0.0)) throw ConfigError("/p", "p must be positive");
    if (samples < 1) throw ConfigError("/samples", "samples must be >= 1");
    if (ell_floor && !(*ell_floor > 0.0)) throw ConfigError("/ell_floor", "ell_floor must be positive");
    if (threads < 0) throw ConfigError("/threads", "threads must be >= 0");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    static const char* known[] = {"case", "M", "K", "epsilons", "theta", "p", "samples",
                                  "base_seed", "operator", "ell_floor", "threads", "output"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("/" + key, "unknown field '" + key + "'");
        }
    }
    ExperimentConfig cfg;
    cfg.case_name = get_string(require(j, "case"), "/case");
    if (j.contains("M")) cfg.M = get_int(j["M"], "/M");
    if (j.contains("K")) cfg.K = get_int(j["K"], "/K");
    if (j.contains("epsilons")) {
        const json& eps = j["epsilons"];
        if (!eps.is_array()) throw ConfigError("/epsilons", "epsilons must be an array");
        cfg.epsilons.clear();
        for (std::size_t i = 0; i < eps.size(); ++i) {
            cfg.epsilons.push_back(get_number(eps[i], "/epsilons/" + std::to_string(i)));
        }
    }
    if (j.contains("theta")) cfg.theta = get_number(j["theta"], "/theta");
    if (j.contains("p")) cfg.p = get_number(j["p"], "/p");
    if (j.contains("samples")) cfg.samples = get_int(j["samples"], "/samples");
    if (j.contains("base_seed")) {
        if (!j["base_seed"].is_number_unsigned()) throw ConfigError("/base_seed", "base_seed must be a non-negative integer");
        cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    }
    if (j.contains("operator")) {
        try {
            cfg.op = parse_operator_kind(get_string(j["operator"], "/operator"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("/operator", e.what());
        }
    }
    if (j.contains("ell_floor")) cfg.ell_floor = get_number(j["ell_floor"], "/ell_floor");
    if (j.contains("threads")) cfg.threads = get_int(j["threads"], "/threads");
    if (j.contains("output")) {
        const json& out = j["output"];
        if (!out.is_object()) throw ConfigError("/output", "output must be an object");
        for (const auto& [key, value] : out.items()) {
            const std::string path = "/output/" + key;
            if (key == "csv") {
                cfg.output.csv = get_string(value, path);
            } else if (key == "json") {
                cfg.output.json = get_string(value, path);
            } else if (key == "svg_dir") {
                cfg.output.svg_dir = get_string(value, path);
            } else {
                throw ConfigError(path, "unknown field '" + key + "'");
            }
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "invalid JSON in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    j["case"] = case_name;
    j["M"] = M;
    j["K"] = K;
    j["epsilons"] = epsilons;
    j["theta"] = theta;
    j["p"] = p;
    j["samples"] = samples;
    j["base_seed"] = base_seed;
    j["operator"] = std::string(to_string(op));
    if (ell_floor) j["ell_floor"] = *ell_floor;
    j["threads"] = threads;
    json out = json::object();
    if (!output.csv.empty()) out["csv"] = output.csv.string();
    if (!output.json.empty()) out["json"] = output.json.string();
    if (!output.svg_dir.empty()) out["svg_dir"] = output.svg_dir.string();
    j["output"] = out;
    return j;
}

void apply_environment_overrides(ExperimentConfig& cfg) {
    if (const char* seed = std::getenv("QRB_BASE_SEED")) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(seed, &used);
            if (used != std::string(seed).size()) throw std::invalid_argument("trailing characters");
            cfg.base_seed = v;
        } catch (const std::exception&) {
            throw ConfigError("/base_seed", "QRB_BASE_SEED is not a non-negative integer");
        }
    }
}

SampleSetup prepare_sample_setup(const ExperimentConfig& cfg, double epsilon) {
    ManufacturedCase problem = case_by_name(cfg.case_name);
    const double floor = cfg.ell_floor.value_or(problem.default_ell_floor);
    const OperatorVariant variant(cfg.op, problem.mbar);
    const RegParams params = select_params(epsilon, cfg.theta, cfg.p, problem.T, variant.c1(), floor);
    SchemeConfig scheme(Grid1D(problem.interval, cfg.M), cfg.K, problem.T);
    const int k = pick_time_index(params.t_eps, scheme);

    auto uf = [&problem](double x) { return problem.u_final(x); };
    auto vf = [&problem](double x) { return problem.v_final(x); };
    SpectralCoeffs true_u = project_all(uf, params.n, scheme.grid);
    SpectralCoeffs true_v = project_all(vf, params.n, scheme.grid);
    return SampleSetup{std::move(problem), params,  scheme, variant, std::move(true_u),
                       std::move(true_v),  k,       cfg.base_seed};
}

std::pair<double, double> error_metric(const Trajectory& traj, int k, const ManufacturedCase& problem,
                                       const Grid1D& grid) {
    if (k < 0 || static_cast<std::size_t>(k) >= traj.size()) throw std::out_of_range("level index out of range");
    const StateField& s = traj.at(k);
    double eu = 0.0;
    double ev = 0.0;
    for (int m = 1; m <= grid.M(); ++m) {
        const auto i = static_cast<std::size_t>(m);
        const double x = grid.x(m);
        const double du = s.u[i] - problem.u.value(x, 0.0);
        const double dv = s.v[i] - problem.v.value(x, 0.0);
        eu += du * du;
        ev += dv * dv;
    }
    return {eu / grid.M(), ev / grid.M()};
}

SampleError run_sample(const SampleSetup& setup, int sample_index, bool exact_terminal) {
    SampleError out;
    out.index = sample_index;
    try {
        const Grid1D& grid = setup.scheme.grid;
        std::pair<std::vector<double>, std::vector<double>> terminal;
        if (exact_terminal) {
            terminal.first = sample([&](double x) { return setup.problem.u_final(x); }, grid);
            terminal.second = sample([&](double x) { return setup.problem.v_final(x); }, grid);
            terminal.first.front() = terminal.first.back() = 0.0;
            terminal.second.front() = terminal.second.back() = 0.0;
        } else {
            const NoiseModel noise(setup.params.epsilon, setup.base_seed + static_cast<std::uint64_t>(sample_index));
            terminal = reconstruct(observe(setup.true_u, setup.true_v, noise, setup.params.n), grid);
        }
        const Trajectory traj =
            solve_backward(std::move(terminal), setup.problem, setup.params, setup.scheme, setup.variant);
        std::tie(out.err_u, out.err_v) = error_metric(traj, setup.k, setup.problem, grid);
        if (!std::isfinite(out.err_u) || !std::isfinite(out.err_v)) {
            out.ok = false;
            out.message = "non-finite error metric";
        }
    } catch (const DivergenceError& e) {
        out.ok = false;
        out.message = std::string("diverged: ") + e.what();
    }
    return out;
}

SampleError run_sample(const ExperimentConfig& cfg, double epsilon, int sample_index) {
    return run_sample(prepare_sample_setup(cfg, epsilon), sample_index);
}

void aggregate(EpsilonResult& result) {
    CompensatedSum su, sv;
    int accepted = 0;
    for (const SampleError& s : result.samples) {
        if (!s.ok) continue;
        su.add(s.err_u);
        sv.add(s.err_v);
        ++accepted;
    }
    result.excluded = static_cast<int>(result.samples.size()) - accepted;
    if (accepted == 0) {
        result.mean_u = result.mean_v = std::nan("");
        result.stderr_u = result.stderr_v = std::nan("");
        return;
    }
    result.mean_u = su.value() / accepted;
    result.mean_v = sv.value() / accepted;
    CompensatedSum qu, qv;
    for (const SampleError& s : result.samples) {
        if (!s.ok) continue;
        qu.add((s.err_u - result.mean_u) * (s.err_u - result.mean_u));
        qv.add((s.err_v - result.mean_v) * (s.err_v - result.mean_v));
    }
    if (accepted > 1) {
        result.stderr_u = std::sqrt(qu.value() / (accepted - 1) / accepted);
        result.stderr_v = std::sqrt(qv.value() / (accepted - 1) / accepted);
    } else {
        result.stderr_u = result.stderr_v = 0.0;
    }
}

ErrorReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ErrorReport report;
    report.config = cfg;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw,
                           static_cast<unsigned>(cfg.samples));

    for (double eps : cfg.epsilons) {
        const SampleSetup setup = prepare_sample_setup(cfg, eps);
        EpsilonResult result;
        result.epsilon = eps;
        result.params = setup.params;
        result.k = setup.k;
        result.t_k = setup.scheme.t(setup.k);
        result.samples.resize(static_cast<std::size_t>(cfg.samples));

        // Each sample writes only its own slot; aggregation happens afterwards
        // in index order, so the result does not depend on scheduling.
        std::atomic<int> next{0};
        auto work = [&]() {
            for (int i = next++; i < cfg.samples; i = next++) {
                result.samples[static_cast<std::size_t>(i)] = run_sample(setup, i);
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        }
        aggregate(result);
        if (result.excluded * 10 > cfg.samples) {
            throw std::runtime_error("epsilon " + std::to_string(eps) + ": " + std::to_string(result.excluded) +
                                     " of " + std::to_string(cfg.samples) + " samples diverged (limit 10%)");
        }
        report.results.push_back(std::move(result));
    }
    return report;
}

json params_to_json(const RegParams& r) {
    return json{{"epsilon", r.epsilon},     {"theta", r.theta},
                {"p", r.p},                 {"T", r.T},
                {"C1", r.C1},               {"beta", r.beta},
                {"n", r.n},                 {"exponent", r.exponent},
                {"gamma_T", r.gamma(r.T)},  {"lambda", r.lambda},
                {"t_eps", r.t_eps},         {"kappa_eps", r.kappa_eps},
                {"kappa_eps_capped", r.kappa_eps_capped},
                {"kappa_rule", "C1*t"},     {"ell_floor", r.ell_floor}};
}

json report_to_json(const ErrorReport& report) {
    json j;
    j["config"] = report.config.to_json();
    json results = json::array();
    for (const EpsilonResult& r : report.results) {
        json e;
        e["epsilon"] = r.epsilon;
        e["params"] = params_to_json(r.params);
        e["k"] = r.k;
        e["t_k"] = r.t_k;
        e["samples"] = r.samples.size();
        e["excluded"] = r.excluded;
        e["mean_err_u"] = r.mean_u;
        e["mean_err_v"] = r.mean_v;
        e["stderr_u"] = r.stderr_u;
        e["stderr_v"] = r.stderr_v;
        e["predicted_rate_t_k"] = predicted_rate(r.t_k, r.params);
        json failures = json::array();
        for (const SampleError& s : r.samples) {
            if (!s.ok) failures.push_back({{"sample_index", s.index}, {"message", s.message}});
        }
        e["failures"] = failures;
        results.push_back(e);
    }
    j["results"] = results;
    return j;
}

std::string report_to_csv(const ErrorReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "case,epsilon,n,t_eps,k,sample_index,err_u,err_v\n";
    for (const EpsilonResult& r : report.results) {
        for (const SampleError& s : r.samples) {
            out << report.config.case_name << ',' << r.epsilon << ',' << r.params.n << ',' << r.params.t_eps << ','
                << r.k << ',' << s.index << ',';
            if (s.ok) {
                out << s.err_u << ',' << s.err_v << '\n';
            } else {
                out << "nan,nan\n";
            }
        }
    }
    return out.str();
}

ReportSummary summary_from_json(const json& j) {
    ReportSummary s;
    for (const json& e : j.at("results")) {
        s.entries.push_back({e.at("epsilon").get<double>(), e.at("mean_err_u").get<double>(),
                             e.at("mean_err_v").get<double>()});
    }
    return s;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string sample_trace_svg(const ErrorReport& report, bool second) {
    SvgPlot plot(second ? "Per-sample squared error, v" : "Per-sample squared error, u", "sample index",
                 "error", false);
    for (const EpsilonResult& r : report.results) {
        std::vector<std::pair<double, double>> pts;
        for (const SampleError& s : r.samples) {
            if (s.ok) pts.emplace_back(s.index + 1, second ? s.err_v : s.err_u);
        }
        std::ostringstream label;
        label << "eps=" << r.epsilon;
        plot.add_series(label.str(), std::move(pts), false);
    }
    return plot.render();
}

std::string convergence_svg(const ErrorReport& report) {
    SvgPlot plot("Averaged error vs noise level", "epsilon", "E(t_k)", true);
    std::vector<std::pair<double, double>> eu, ev, rate;
    for (const EpsilonResult& r : report.results) {
        eu.emplace_back(r.epsilon, r.mean_u);
        ev.emplace_back(r.epsilon, r.mean_v);
    }
    if (!report.results.empty()) {
        // Predicted shape, anchored at the first averaged u error.
        const EpsilonResult& first = report.results.front();
        const double scale = first.mean_u / predicted_rate(first.t_k, first.params);
        for (const EpsilonResult& r : report.results) {
            rate.emplace_back(r.epsilon, scale * predicted_rate(r.t_k, r.params));
        }
    }
    plot.add_series("E_u", std::move(eu), true);
    plot.add_series("E_v", std::move(ev), true);
    plot.add_series("predicted shape", std::move(rate), true, true);
    return plot.render();
}

}  // namespace

void emit(const ErrorReport& report, const OutputPaths& paths) {
    if (!paths.csv.empty()) write_file(paths.csv, report_to_csv(report));
    if (!paths.json.empty()) write_file(paths.json, report_to_json(report).dump(2) + "\n");
    if (!paths.svg_dir.empty()) {
        const std::string stem = report.config.case_name;
        write_file(paths.svg_dir / (stem + "_samples_u.svg"), sample_trace_svg(report, false));
        write_file(paths.svg_dir / (stem + "_samples_v.svg"), sample_trace_svg(report, true));
        write_file(paths.svg_dir / (stem + "_convergence.svg"), convergence_svg(report));
    }
}

void emit(const ErrorReport& report) { emit(report, report.config.output); }

}  // namespace qrb
