// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qrbackward/harness.hpp"
#include "qrbackward/params.hpp"
#include "qrbackward/regops.hpp"
#include "qrbackward/verify.hpp"

using namespace qrb;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(5);
    s << v;
    return s.str();
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

struct Band {
    double eps;
    bool second;
    double lo, hi;
};

ExperimentConfig reproduction_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.case_name = name;
    cfg.M = 15;
    cfg.K = 100;
    cfg.samples = 100;
    cfg.theta = 0.3;
    cfg.p = 1.0;
    cfg.epsilons = {1e-3, 1e-4, 1e-5};
    cfg.op = OperatorKind::TruncationQR;
    return cfg;
}

const EpsilonResult& result_for(const ErrorReport& r, double eps) {
    for (const auto& e : r.results)
        if (e.epsilon == eps) return e;
    throw std::runtime_error("missing epsilon");
}

Outcome check_bands(const ErrorReport& report, const std::vector<Band>& bands, bool require_trend) {
    bool ok = true;
    std::ostringstream d;
    for (const Band& b : bands) {
        const auto& r = result_for(report, b.eps);
        const double v = b.second ? r.mean_v : r.mean_u;
        const bool in = within(v, b.lo, b.hi);
        ok = ok && in;
        d << (b.second ? "E_v" : "E_u") << "(" << num(b.eps) << ")=" << num(v) << (in ? " " : "[out] ");
    }
    if (require_trend) {
        for (bool second : {false, true}) {
            double prev = 1e300;
            bool mono = true;
            for (const auto& r : report.results) {
                const double v = second ? r.mean_v : r.mean_u;
                mono = mono && v < prev;
                prev = v;
            }
            ok = ok && mono;
            d << (second ? "v" : "u") << (mono ? " decreasing " : " NOT decreasing ");
        }
    }
    return {ok, d.str()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    ErrorReport test1_report, test2_report;
    bool have1 = false, have2 = false;
    auto report1 = [&]() -> const ErrorReport& {
        if (!have1) test1_report = run_experiment(reproduction_config("test1"));
        have1 = true;
        return test1_report;
    };
    auto report2 = [&]() -> const ErrorReport& {
        if (!have2) test2_report = run_experiment(reproduction_config("test2"));
        have2 = true;
        return test2_report;
    };

    std::vector<Criterion> criteria;

    criteria.push_back({1, "test1 reproduction bands", [&] {
                            return check_bands(report1(),
                                               {{1e-3, false, 0.006, 0.026},
                                                {1e-5, false, 0.0016, 0.0064},
                                                {1e-3, true, 0.048, 0.19},
                                                {1e-5, true, 0.033, 0.13}},
                                               false);
                        }});

    criteria.push_back({2, "test2 reproduction bands and trend", [&] {
                            return check_bands(report2(),
                                               {{1e-3, false, 0.001, 0.004},
                                                {1e-5, false, 0.0009, 0.0036},
                                                {1e-3, true, 0.023, 0.093},
                                                {1e-5, true, 0.013, 0.054}},
                                               true);
                        }});

    criteria.push_back({3, "truncated reconstruction MSE bound", [] {
                            const auto t0 = std::chrono::steady_clock::now();
                            const auto stats = verify::mse_bound_batches({1e-3, 1e-4, 1e-5}, 0.3, 1.0, 20, 500,
                                                                           2048, 20200701);
                            const double secs = seconds_since(t0);
                            bool ok = secs < 60.0;
                            int worst_pass = 20;
                            for (const auto& s : stats) {
                                ok = ok && s.passing * 100 >= 95 * s.batches;
                                worst_pass = std::min(worst_pass, s.passing);
                            }
                            return Outcome{ok, std::to_string(stats.size()) + " datum/eps pairs, worst " +
                                                   std::to_string(worst_pass) + "/20 batches within bound, " +
                                                   num(secs) + " s"};
                        }});

    criteria.push_back({4, "operator bounds", [] {
                            // Test 1 regime: Mbar = 1, lambda for eps in {1e-3, 1e-4, 1e-5}, 14 modes.
                            std::vector<double> lambdas;
                            for (double eps : {1e-3, 1e-4, 1e-5})
                                lambdas.push_back(frequency_threshold({eps, 0.3, 1.0, 1.0, 1.0}).lambda);
                            bool ok = true;
                            std::ostringstream d;
                            for (OperatorKind k :
                                 {OperatorKind::TruncationQR, OperatorKind::ClassicalQR, OperatorKind::HybridQR}) {
                                const auto s = verify::operator_bounds(k, 1.0, lambdas, 1000, 14, 4242);
                                ok = ok && s.stabilized_violations == 0 && s.perturbing_violations == 0;
                                d << to_string(k) << " P:" << s.stabilized_violations << " Q:" << s.perturbing_violations
                                  << " (worst |Pu|/bound " << num(s.worst_stabilized_ratio) << ") ";
                            }
                            return Outcome{ok, d.str()};
                        }});

    criteria.push_back({5, "manufactured residuals", [] {
                            const auto a = verify::manufactured_residuals(test1(), 10000, 1);
                            const auto b = verify::manufactured_residuals(test2(), 10000, 2);
                            return Outcome{a.max_abs < 1e-9 && b.max_abs < 1e-9,
                                           "test1 max " + num(a.max_abs) + ", test2 max " + num(b.max_abs)};
                        }});

    criteria.push_back({6, "Thomas vs dense LU", [] {
                            const auto s = verify::thomas_vs_dense(100, 12, 77);
                            return Outcome{s.max_diff <= 1e-12 && s.all_dominant && s.systems == 100,
                                           std::to_string(s.systems) + " blocks, max diff " + num(s.max_diff) +
                                               (s.all_dominant ? ", all dominant" : ", NOT all dominant")};
                        }});

    criteria.push_back({7, "parameter recipes", [] {
                            const int n3 = observation_count(1e-3, 0.3), n5 = observation_count(1e-5, 0.3);
                            const double t3 = solve_t_eps(1e-3, 0.3, 1.0, 1.0), t4 = solve_t_eps(1e-4, 0.3, 1.0, 1.0);
                            const double r3 = std::abs(std::log(t3) + 0.7 * std::log(1e3) * t3);
                            const double r4 = std::abs(std::log(t4) + 0.7 * std::log(1e4) * t4);
                            const Interval iv(0.0, 3.14159265358979323846);
                            auto set = [&](double eps, double C1) {
                                return admissible_set(frequency_threshold({eps, 0.3, 1.0, C1, 1.0}), iv);
                            };
                            const bool ok = n3 == 63 && n5 == 1000 && std::abs(t3 - 0.270) < 5e-4 &&
                                            std::abs(t4 - 0.229) < 5e-4 && r3 < 1e-12 && r4 < 1e-12 &&
                                            set(1e-3, 1.0) == std::vector<int>{1, 2} &&
                                            set(1e-5, 1.0) == std::vector<int>{1, 2} &&
                                            set(1e-4, 4.0) == std::vector<int>{1};
                            return Outcome{ok, "n=" + std::to_string(n3) + "," + std::to_string(n5) + " t_eps=" +
                                                   num(t3) + "," + num(t4) + " residual<=" + num(std::max(r3, r4))};
                        }});

    criteria.push_back({8, "forward refinement", [] {
                            const auto t0 = std::chrono::steady_clock::now();
                            const auto r = verify::forward_refinement(test1(), 400, {10, 20, 40, 80});
                            const double secs = seconds_since(t0);
                            const double worst = *std::min_element(r.ratio.begin(), r.ratio.end());
                            std::ostringstream d;
                            d << "ratios";
                            for (double q : r.ratio) d << ' ' << num(q);
                            d << ", " << num(secs) << " s";
                            return Outcome{worst >= 1.8 && secs < 60.0, d.str()};
                        }});

    criteria.push_back({9, "error slope vs predicted rate", [&] {
                            bool ok = true;
                            std::ostringstream d;
                            for (const ErrorReport* rep : {&report1(), &report2()}) {
                                const auto& lo = result_for(*rep, 1e-3);
                                const auto& hi = result_for(*rep, 1e-5);
                                const double dl = std::log(hi.epsilon) - std::log(lo.epsilon);
                                const double predicted =
                                    (std::log(predicted_rate(hi.t_k, hi.params)) - std::log(predicted_rate(lo.t_k, lo.params))) / dl;
                                for (bool second : {false, true}) {
                                    const double a = second ? lo.mean_v : lo.mean_u;
                                    const double b = second ? hi.mean_v : hi.mean_u;
                                    const double slope = (std::log(b) - std::log(a)) / dl;
                                    const double ratio = slope / predicted;
                                    const bool in = ratio >= 1.0 / 3.0 && ratio <= 3.0;
                                    ok = ok && in;
                                    d << rep->config.case_name << (second ? ".v" : ".u") << " slope " << num(slope)
                                      << "/" << num(predicted) << "=" << num(ratio) << (in ? " " : "[out] ");
                                }
                            }
                            return Outcome{ok, d.str()};
                        }});

    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
