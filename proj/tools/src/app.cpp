#include "voltrack_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voltrack/errors.hpp"
#include "voltrack/eval.hpp"
#include "voltrack/filters.hpp"
#include "voltrack/simulate.hpp"
#include "voltrack/tuning.hpp"
#include "voltrack_cli/io.hpp"
#include "voltrack_cli/reports.hpp"

namespace voltrack::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr const char* kFooter = R"(Input CSV: a header row is required. Either one column of prices, two
columns (date, price), or any layout with a column named price, adjclose,
adj_close or close. Prices must be positive; the error names the line.

Outputs: estimates index,x,v_hat,residual; path t,price,x,v_bar;
convergence n,mse (+ .json, + .plot.dat with log n, log mse); ordering
theta,sn,vn (+ .json); bench series,method,sn (+ .json). Relative output
paths are resolved against $VOLTRACK_OUTPUT_DIR when it is set.)";

struct SeriesOptions {
    std::string input;
    std::string scenario;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double delta = kTradingDaysDelta;
};

struct FilterOptions {
    std::string filter = "filter0";
    int k = 0;
    bool tune = false;
    std::optional<double> theta;
    std::vector<double> a;
    std::vector<double> g;
    std::optional<double> level;
};

// Observations plus, for simulated input, the true interval volatility.
struct LoadedSeries {
    std::string name;
    std::vector<double> xs;
    std::optional<std::vector<double>> v_bar;
    double delta = 0.0;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario load_scenario(const std::string& path) { return Scenario::parse(read_text(path)); }

void add_series_options(CLI::App* cmd, SeriesOptions& s) {
    cmd->add_option("--input", s.input, "Price CSV to read");
    cmd->add_option("--scenario", s.scenario, "Scenario file to simulate instead of reading prices");
    cmd->add_option("--n", s.n, "Simulated sample size")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    cmd->add_option("--seed", s.seed, "Simulation seed");
    cmd->add_option("--delta", s.delta, "Sampling interval in years for --input (default 1/252)")
        ->check(CLI::PositiveNumber);
}

void add_filter_options(CLI::App* cmd, FilterOptions& f, bool allow_explicit) {
    cmd->add_option("--filter", f.filter, "garch11|garch22|filter0|filter1|filter2|adaptive")
        ->check(CLI::IsMember({"garch11", "garch22", "filter0", "filter1", "filter2", "adaptive"}));
    cmd->add_option("--k", f.k, "Smoothness order for filter0/adaptive")->check(CLI::Range(0, kMaxOrder));
    if (!allow_explicit) return;
    cmd->add_flag("--tune", f.tune, "Tune parameters instead of passing them");
    cmd->add_option("--theta", f.theta, "Adaptation parameter");
    cmd->add_option("--a", f.a, "Comma-separated a coefficients")->delimiter(',');
    cmd->add_option("--g", f.g, "Comma-separated GARCH g coefficients")->delimiter(',');
    cmd->add_option("--level", f.level, "Long-run level K (GARCH constant for garch kinds)");
}

LoadedSeries load_series(const SeriesOptions& s) {
    if (s.input.empty() == s.scenario.empty()) throw UsageError("give exactly one of --input or --scenario");
    LoadedSeries out;
    if (!s.input.empty()) {
        const PriceSeries prices = load_prices(s.input, s.delta);
        out.name = prices.name;
        out.delta = prices.delta;
        out.xs = compute_heteroscedasticity(prices.prices, prices.delta);
    } else {
        const PathResult path = generate_path(load_scenario(s.scenario), s.n, s.seed);
        out.name = fs::path(s.scenario).stem().string();
        out.delta = path.delta;
        out.xs = path.xs;
        out.v_bar = path.v_bar;
    }
    return out;
}

int filter_order(const FilterOptions& f) {
    if (f.filter == "filter1" || f.filter.starts_with("garch")) return 0;
    if (f.filter == "filter2") return 1;
    return f.k;
}

FilterConfig explicit_config(const FilterOptions& f) {
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) throw UsageError("--filter " + f.filter + " needs " + what + " (or --tune)");
    };
    auto a_count = [&](std::size_t n) {
        need(f.a.size() == n, "--a with " + std::to_string(n) + " value" + (n == 1 ? "" : "s"));
    };
    if (f.filter.starts_with("garch")) {
        const int order = f.filter == "garch11" ? 1 : 2;
        need(f.level.has_value(), "--level");
        need(f.g.size() == static_cast<std::size_t>(order), "--g with " + std::to_string(order) + " values");
        a_count(static_cast<std::size_t>(order));
        if (f.theta) throw UsageError("--theta does not apply to GARCH");
        return GarchParams{order, order, *f.level, f.g, f.a};
    }
    need(f.theta.has_value(), "--theta");
    if (!f.g.empty()) throw UsageError("--g only applies to GARCH");
    if (f.filter == "filter0") {
        if (!f.a.empty() || f.level) throw UsageError("filter0 takes only --theta; use adaptive for feedback");
        return ExtendedParams::pure(f.k, *f.theta);
    }
    need(f.level.has_value(), "--level");
    if (f.filter == "filter1") {
        a_count(1);
        return Filter1Params{*f.theta, f.a[0], *f.level};
    }
    if (f.filter == "filter2") {
        a_count(2);
        return Filter2Params{*f.theta, f.a[0], f.a[1], *f.level};
    }
    a_count(static_cast<std::size_t>(f.k + 1));
    return ExtendedParams{f.k, *f.theta, f.a, *f.level};
}

TuningReport tune_config(const FilterOptions& f, const std::vector<double>& xs) {
    if (f.filter == "filter0") return tune_filter0(xs, f.k);
    if (f.filter == "filter1") return tune_filter1(xs);
    if (f.filter == "filter2") return tune_filter2(xs);
    if (f.filter == "garch11") return fit_garch(xs, 1, 1);
    if (f.filter == "garch22") return fit_garch(xs, 2, 2);
    throw UsageError("adaptive has no tuning procedure; tune filter0, filter1 or filter2");
}

bool has_explicit(const FilterOptions& f) { return f.theta || !f.a.empty() || !f.g.empty() || f.level; }

fs::path sibling(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    p += suffix;
    return p;
}

std::string fmt(double x) { return format_double(x); }

// Collapses a diagnostic to one line.
std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"voltrack: adaptive historical-volatility tracking"};
    app.name("voltrack");
    app.footer(kFooter);
    app.require_subcommand(1);

    SeriesOptions series;
    FilterOptions filter;
    std::string out_path;
    std::string json_path;
    double burn_factor = 1.0;

    auto* track = app.add_subcommand("track", "Run a filter over a series and write its estimates");
    add_series_options(track, series);
    add_filter_options(track, filter, true);
    track->add_option("--burn-in", burn_factor, "Burn-in factor c for V_n on simulated input")->check(CLI::PositiveNumber);
    track->add_option("--out", out_path, "Estimates CSV")->required();

    auto* tune = app.add_subcommand("tune", "Tune a filter and write the tuning report JSON");
    add_series_options(tune, series);
    add_filter_options(tune, filter, false);
    tune->add_option("--out", out_path, "Report JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "Simulate a price path from a scenario");
    simulate->add_option("--scenario", series.scenario, "Scenario file")->required();
    simulate->add_option("--n", series.n, "Number of intervals")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    simulate->add_option("--seed", series.seed, "Seed");
    simulate->add_option("--out", out_path, "Path CSV")->required();

    std::vector<std::string> bench_inputs;
    int bench_series = 0;
    auto* bench = app.add_subcommand("bench", "Tune every method on every series (prediction-error table)");
    bench->add_option("--input", bench_inputs, "Price CSV (repeatable)");
    bench->add_option("--scenario", series.scenario, "Scenario for synthetic series");
    bench->add_option("--series", bench_series, "Number of synthetic series from --scenario")->check(CLI::Range(1, 1000));
    bench->add_option("--n", series.n, "Synthetic sample size")->check(CLI::Range(std::size_t{100}, std::size_t{100000000}));
    bench->add_option("--seed", series.seed, "Base seed for synthetic series");
    bench->add_option("--delta", series.delta, "Sampling interval in years for --input")->check(CLI::PositiveNumber);
    bench->add_option("--out", out_path, "Bench CSV")->required();
    bench->add_option("--json", json_path, "Bench JSON (default: next to --out)");

    std::vector<std::size_t> n_values;
    int seeds = 20;
    std::uint64_t base_seed = ExperimentOptions{}.base_seed;
    auto* convergence = app.add_subcommand("convergence", "Fit the V_n rate slope over sample sizes");
    convergence->add_option("--scenario", series.scenario, "Scenario file")->required();
    convergence->add_option("--k", filter.k, "Smoothness order")->check(CLI::Range(0, kMaxOrder));
    convergence->add_option("--n", n_values, "Comma-separated sample sizes")->delimiter(',')->required();
    convergence->add_option("--seeds", seeds, "Evaluation paths per n")->check(CLI::Range(1, 100000));
    convergence->add_option("--seed", base_seed, "Base seed");
    convergence->add_option("--burn-in", burn_factor, "Burn-in factor c")->check(CLI::PositiveNumber);
    convergence->add_option("--out", out_path, "Convergence CSV")->required();

    std::vector<double> theta_grid;
    std::vector<double> grid_spec{1e-2, 1e2, 20};
    std::size_t ordering_n = 4000;
    auto* ordering = app.add_subcommand("ordering", "Compare S_n and V_n rankings over a theta grid");
    ordering->add_option("--scenario", series.scenario, "Scenario file")->required();
    ordering->add_option("--k", filter.k, "Smoothness order")->check(CLI::Range(0, kMaxOrder));
    ordering->add_option("--n", ordering_n, "Sample size")->check(CLI::Range(std::size_t{8}, std::size_t{100000000}));
    ordering->add_option("--seeds", seeds, "Common paths")->check(CLI::Range(1, 100000));
    ordering->add_option("--seed", base_seed, "Base seed");
    ordering->add_option("--burn-in", burn_factor, "Burn-in factor c")->check(CLI::PositiveNumber);
    auto* theta_opt = ordering->add_option("--theta", theta_grid, "Comma-separated theta values")->delimiter(',');
    ordering->add_option("--grid", grid_spec, "Log grid lo,hi,count (default 0.01,100,20)")
        ->delimiter(',')
        ->expected(3)
        ->excludes(theta_opt);
    ordering->add_option("--out", out_path, "Ordering CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.back()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "voltrack: usage error: " << one_line(e.what()) << " (see --help)\n";
        return kExitUsage;
    }

    try {
        if (track->parsed()) {
            if (filter.tune && has_explicit(filter)) throw UsageError("--tune excludes explicit parameters");
            const LoadedSeries s = load_series(series);
            const FilterConfig config = filter.tune ? tune_config(filter, s.xs).best_params : explicit_config(filter);
            const TrackResult tr = run(s.xs, config);
            write_atomic(output_path(out_path), estimates_csv(s.xs, tr.estimates, tr.residuals));
            out << "S_n = " << fmt(tr.s_n) << " (n = " << s.xs.size() << ", " << filter.filter << ")\n";
            if (s.v_bar) {
                const std::size_t burn = burn_in_index(s.xs.size(), filter_order(filter), burn_factor);
                out << "V_n = " << fmt(vn_metric(*s.v_bar, tr.estimates, burn)) << " (after " << burn << " burn-in steps)\n";
            }
        } else if (tune->parsed()) {
            const LoadedSeries s = load_series(series);
            const TuningReport report = tune_config(filter, s.xs);
            write_atomic(output_path(out_path), tuning_json(report, filter.filter, s.xs.size(), s.delta).dump(2) + "\n");
            out << "best S_n = " << fmt(report.best_sn) << " after " << report.evaluations.size() << " evaluations\n";
        } else if (simulate->parsed()) {
            const Scenario scenario = load_scenario(series.scenario);
            const PathResult path = generate_path(scenario, series.n, series.seed);
            write_atomic(output_path(out_path), path_csv(path, scenario.horizon));
            out << "delta = " << fmt(path.delta) << " (n = " << series.n << ", seed = " << series.seed << ")\n";
        } else if (bench->parsed()) {
            std::vector<NamedSeries> set;
            for (const auto& input : bench_inputs) {
                const PriceSeries p = load_prices(input, series.delta);
                set.push_back({p.name, compute_heteroscedasticity(p.prices, p.delta)});
            }
            if (!series.scenario.empty()) {
                const Scenario scenario = load_scenario(series.scenario);
                const int count = bench_series > 0 ? bench_series : 1;
                for (int i = 0; i < count; ++i) {
                    const auto seed = series.seed + static_cast<std::uint64_t>(i);
                    set.push_back({"sim" + std::to_string(i + 1), generate_path(scenario, series.n, seed).xs});
                }
            } else if (bench_series > 0) {
                throw UsageError("--series needs --scenario");
            }
            if (set.empty()) throw UsageError("bench needs --input or --scenario");
            const BenchReport report = benchmark_report(set);
            const fs::path csv = output_path(out_path);
            write_atomic(csv, bench_csv(report));
            write_atomic(json_path.empty() ? sibling(csv, ".json") : output_path(json_path),
                         bench_json(report, series.delta).dump(2) + "\n");
            for (const auto& row : report.rows) {
                out << row.name;
                for (std::size_t m = 0; m < kBenchMethods.size(); ++m) {
                    out << ' ' << kBenchMethods[m] << '=' << (row.cells[m] ? fmt(*row.cells[m]) : std::string("-"));
                }
                out << '\n';
            }
        } else if (convergence->parsed()) {
            const Scenario scenario = load_scenario(series.scenario);
            ExperimentOptions opt;
            opt.base_seed = base_seed;
            opt.burn_in_factor = burn_factor;
            const ConvergenceResult r = convergence_experiment(scenario, filter.k, n_values, seeds, opt);
            const fs::path csv = output_path(out_path);
            write_atomic(csv, convergence_csv(r));
            write_atomic(sibling(csv, ".json"), convergence_json(r, scenario).dump(2) + "\n");
            write_atomic(sibling(csv, ".plot.dat"), convergence_plot(r));
            out << "fitted slope = " << fmt(r.fitted_slope) << " (theoretical " << fmt(r.theoretical_slope) << ")\n";
        } else if (ordering->parsed()) {
            const Scenario scenario = load_scenario(series.scenario);
            if (theta_grid.empty()) {
                const double lo = grid_spec[0], hi = grid_spec[1];
                const double count = grid_spec[2];
                if (!(lo > 0.0) || !(hi > lo) || count < 2 || count != std::floor(count)) {
                    throw UsageError("--grid needs 0 < lo < hi and an integer count >= 2");
                }
                const int m = static_cast<int>(count);
                for (int i = 0; i < m; ++i) theta_grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1)));
            }
            ExperimentOptions opt;
            opt.base_seed = base_seed;
            opt.burn_in_factor = burn_factor;
            const OrderingResult r = ordering_agreement(scenario, theta_grid, ordering_n, seeds, filter.k, opt);
            const fs::path csv = output_path(out_path);
            write_atomic(csv, ordering_csv(r));
            write_atomic(sibling(csv, ".json"), ordering_json(r, filter.k, ordering_n, seeds).dump(2) + "\n");
            out << "kendall tau = " << fmt(r.kendall_tau) << ", argmin match = " << (r.argmin_match ? "yes" : "no") << '\n';
        }
    } catch (const UsageError& e) {
        err << "voltrack: usage error: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "voltrack: error: " << one_line(e.what()) << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace voltrack::cli
