#include "voltrack_cli/reports.hpp"

#include <cmath>
#include <variant>

#include "voltrack/errors.hpp"
#include "voltrack_cli/io.hpp"

namespace voltrack::cli {
namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("parameter set lacks '") + key + "'");
    return j.at(key).get<T>();
}

}  // namespace

json params_json(const FilterConfig& config) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExtendedParams>) {
                return {{"kind", "adaptive"}, {"k", p.k}, {"theta", p.theta}, {"a", p.a_coeffs}, {"level", p.k_level}};
            } else if constexpr (std::is_same_v<T, Filter1Params>) {
                return {{"kind", "filter1"}, {"theta", p.theta}, {"a1", p.a1}, {"level", p.k_level}};
            } else if constexpr (std::is_same_v<T, Filter2Params>) {
                return {{"kind", "filter2"}, {"theta", p.theta}, {"a1", p.a1}, {"a2", p.a2}, {"level", p.k_level}};
            } else {
                return {{"kind", "garch"}, {"p", p.p}, {"q", p.q}, {"k", p.k_const}, {"g", p.g_coeffs},
                        {"a", p.a_coeffs}};
            }
        },
        config);
}

FilterConfig params_from_json(const json& j) {
    try {
        const auto kind = field<std::string>(j, "kind");
        if (kind == "adaptive") {
            return ExtendedParams{field<int>(j, "k"), field<double>(j, "theta"), field<std::vector<double>>(j, "a"),
                                  field<double>(j, "level")};
        }
        if (kind == "filter1") return Filter1Params{field<double>(j, "theta"), field<double>(j, "a1"), field<double>(j, "level")};
        if (kind == "filter2") {
            return Filter2Params{field<double>(j, "theta"), field<double>(j, "a1"), field<double>(j, "a2"),
                                 field<double>(j, "level")};
        }
        if (kind == "garch") {
            return GarchParams{field<int>(j, "p"), field<int>(j, "q"), field<double>(j, "k"),
                               field<std::vector<double>>(j, "g"), field<std::vector<double>>(j, "a")};
        }
        throw ParseError("unknown parameter kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad parameter set: ") + e.what());
    }
}

json tuning_json(const TuningReport& report, std::string_view method, std::size_t n, double delta) {
    json trace = json::array();
    for (const auto& t : report.trace) trace.push_back({{"stage", t.stage}, {"params", params_json(t.params)}, {"sn", t.s_n}});
    json evals = json::array();
    for (const auto& e : report.evaluations) evals.push_back({{"params", params_json(e.params)}, {"sn", e.s_n}});
    return {{"schema_version", kSchemaVersion},
            {"report", "tuning"},
            {"method", method},
            {"n", n},
            {"delta", delta},
            {"best_sn", report.best_sn},
            {"best_params", params_json(report.best_params)},
            {"trace", trace},
            {"evaluations", evals}};
}

json convergence_json(const ConvergenceResult& r, const Scenario& scenario) {
    return {{"schema_version", kSchemaVersion},
            {"report", "convergence"},
            {"scenario", scenario.serialize()},
            {"k", r.k},
            {"n", r.n_values},
            {"mse", r.mse_values},
            {"tuned_theta", r.tuned_thetas},
            {"fitted_slope", r.fitted_slope},
            {"theoretical_slope", r.theoretical_slope},
            {"seeds_per_n", r.seeds_per_n}};
}

json ordering_json(const OrderingResult& r, int k, std::size_t n, int seeds) {
    return {{"schema_version", kSchemaVersion},
            {"report", "ordering"},
            {"k", k},
            {"n", n},
            {"seeds", seeds},
            {"theta", r.theta_grid},
            {"sn", r.sn_values},
            {"vn", r.vn_values},
            {"kendall_tau", r.kendall_tau},
            {"argmin_match", r.argmin_match}};
}

json bench_json(const BenchReport& report, double delta) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json cells = json::object();
        for (std::size_t m = 0; m < kBenchMethods.size(); ++m) {
            const std::string name(kBenchMethods[m]);
            if (row.cells[m]) cells[name] = {{"sn", *row.cells[m]}};
            else cells[name] = {{"sn", nullptr}, {"error", row.errors[m]}};
        }
        rows.push_back({{"series", row.name}, {"n", row.n}, {"cells", cells}});
    }
    return {{"schema_version", kSchemaVersion}, {"report", "bench"}, {"delta", delta}, {"rows", rows}};
}

std::string bench_csv(const BenchReport& report) {
    std::string out = "series,method,sn\n";
    for (const auto& row : report.rows) {
        for (std::size_t m = 0; m < kBenchMethods.size(); ++m) {
            if (!row.cells[m]) continue;
            out += row.name + ',' + std::string(kBenchMethods[m]) + ',' + format_double(*row.cells[m]) + '\n';
        }
    }
    return out;
}

std::string convergence_csv(const ConvergenceResult& r) {
    std::string out = "n,mse\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        out += std::to_string(r.n_values[i]) + ',' + format_double(r.mse_values[i]) + '\n';
    }
    return out;
}

std::string convergence_plot(const ConvergenceResult& r) {
    std::string out = "# log_n log_mse\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        out += format_double(std::log(static_cast<double>(r.n_values[i]))) + ' ' +
               format_double(std::log(r.mse_values[i])) + '\n';
    }
    return out;
}

std::string ordering_csv(const OrderingResult& r) {
    std::string out = "theta,sn,vn\n";
    for (std::size_t i = 0; i < r.theta_grid.size(); ++i) {
        out += format_double(r.theta_grid[i]) + ',' + format_double(r.sn_values[i]) + ',' +
               format_double(r.vn_values[i]) + '\n';
    }
    return out;
}

}  // namespace voltrack::cli
