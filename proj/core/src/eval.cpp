#include "voltrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voltrack/errors.hpp"
#include "voltrack/filters.hpp"
#include "voltrack/random.hpp"
#include "voltrack/simulate.hpp"
#include "voltrack/tuning.hpp"

namespace voltrack {
namespace {

// Stream tags keep tuning, evaluation and replication seeds disjoint.
constexpr std::uint64_t kTuneStream = 1;
constexpr std::uint64_t kEvalStream = 2;

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(derive_seed(base, tag), a), b);
}

double tuned_theta(const Scenario& scenario, int k, std::size_t n, const ExperimentOptions& options) {
    const PathResult holdout = generate_path(scenario, n, cell_seed(options.base_seed, kTuneStream, n, 0));
    const TuningReport report = tune_filter0(holdout.xs, k);
    return std::get<ExtendedParams>(report.best_params).theta;
}

void check_n_values(std::span<const std::size_t> n_values) {
    if (n_values.size() < 3) throw ArgumentError("need at least three sample sizes");
    if (!std::is_sorted(n_values.begin(), n_values.end()) ||
        std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end()) {
        throw ArgumentError("sample sizes must be strictly increasing");
    }
}

}  // namespace

std::size_t burn_in_index(std::size_t n, int k, double c) {
    if (n < 2) throw ArgumentError("n must be at least 2");
    if (!(c > 0.0)) throw ArgumentError("burn-in factor must be positive");
    if (k < 0) throw ArgumentError("smoothness order must be >= 0");
    const double exponent = (2.0 * k + 2.0) / (2.0 * k + 3.0);
    // pow can land a hair above an exact integer; do not let that round up.
    const double raw = c * std::pow(static_cast<double>(n), exponent);
    const double layer = std::ceil(raw - 1e-9 * raw);
    return std::min(static_cast<std::size_t>(layer), n / 4);
}

double vn_metric(std::span<const double> v_true, std::span<const double> estimates, std::size_t burn_in) {
    if (v_true.size() != estimates.size()) throw ArgumentError("v_true and estimates differ in length");
    if (burn_in >= v_true.size()) throw ArgumentError("burn-in leaves no samples");
    double sum = 0.0;
    for (std::size_t i = burn_in; i < v_true.size(); ++i) {
        const double d = v_true[i] - estimates[i];
        sum += d * d;
    }
    return sum / static_cast<double>(v_true.size() - burn_in);
}

double sn_metric(std::span<const double> xs, std::span<const double> estimates, std::size_t burn_in) {
    return vn_metric(xs, estimates, burn_in);
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ArgumentError("kendall_tau needs equal lengths");
    if (a.size() < 2) throw ArgumentError("kendall_tau needs at least two points");
    double concordant = 0.0, discordant = 0.0, ties_a = 0.0, ties_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;
            if (da == 0.0) {
                ties_a += 1.0;
            } else if (db == 0.0) {
                ties_b += 1.0;
            } else if ((da > 0.0) == (db > 0.0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    const double denom = std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
    return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope needs two or more paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("log-log slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double theoretical_rate_slope(int k) { return -2.0 * (k + 1.0) / (2.0 * k + 3.0); }

ConvergenceResult convergence_experiment(const Scenario& scenario, int k, std::span<const std::size_t> n_values,
                                         int seeds, const ExperimentOptions& options) {
    check_n_values(n_values);
    if (seeds < 1) throw ArgumentError("need at least one seed");
    if (scenario.smoothness < k) throw ArgumentError("scenario smoothness is below the filter order");

    ConvergenceResult out;
    out.k = k;
    out.n_values.assign(n_values.begin(), n_values.end());
    out.theoretical_slope = theoretical_rate_slope(k);
    out.seeds_per_n = seeds;

    for (std::size_t n : n_values) {
        const double theta = tuned_theta(scenario, k, n, options);
        const std::size_t burn = burn_in_index(n, k, options.burn_in_factor);
        double total = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const PathResult path = generate_path(scenario, n, cell_seed(options.base_seed, kEvalStream, n, static_cast<std::uint64_t>(s)));
            const TrackResult tr = run(path.xs, ExtendedParams::pure(k, theta));
            total += vn_metric(path.v_bar, tr.estimates, burn);
        }
        out.tuned_thetas.push_back(theta);
        out.mse_values.push_back(total / seeds);
    }
    std::vector<double> ns(out.n_values.begin(), out.n_values.end());
    out.fitted_slope = loglog_slope(ns, out.mse_values);
    return out;
}

OrderingResult make_ordering_result(std::vector<double> theta_grid, std::vector<double> sn_values,
                                    std::vector<double> vn_values) {
    if (theta_grid.size() != sn_values.size() || sn_values.size() != vn_values.size()) {
        throw ArgumentError("ordering sequences must have equal lengths");
    }
    OrderingResult out;
    out.kendall_tau = kendall_tau(sn_values, vn_values);
    out.argmin_match = std::min_element(sn_values.begin(), sn_values.end()) - sn_values.begin() ==
                       std::min_element(vn_values.begin(), vn_values.end()) - vn_values.begin();
    out.theta_grid = std::move(theta_grid);
    out.sn_values = std::move(sn_values);
    out.vn_values = std::move(vn_values);
    return out;
}

OrderingResult ordering_agreement(const Scenario& scenario, std::span<const double> theta_grid, std::size_t n,
                                  int seeds, int k, const ExperimentOptions& options) {
    if (theta_grid.size() < 2) throw ArgumentError("theta grid needs at least two points");
    for (std::size_t i = 1; i < theta_grid.size(); ++i) {
        if (!(theta_grid[i] > theta_grid[i - 1])) throw ArgumentError("theta grid must be strictly increasing");
    }
    if (seeds < 1) throw ArgumentError("need at least one seed");

    const std::size_t burn = burn_in_index(n, k, options.burn_in_factor);
    std::vector<double> sn(theta_grid.size(), 0.0), vn(theta_grid.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const PathResult path = generate_path(scenario, n, cell_seed(options.base_seed, kEvalStream, n, static_cast<std::uint64_t>(s)));
        for (std::size_t t = 0; t < theta_grid.size(); ++t) {
            const TrackResult tr = run(path.xs, ExtendedParams::pure(k, theta_grid[t]));
            sn[t] += sn_metric(path.xs, tr.estimates, burn) / seeds;
            vn[t] += vn_metric(path.v_bar, tr.estimates, burn) / seeds;
        }
    }
    return make_ordering_result({theta_grid.begin(), theta_grid.end()}, std::move(sn), std::move(vn));
}

RobustnessResult nuisance_robustness(const Scenario& scenario, int k, std::span<const std::size_t> n_values, int seeds,
                                     const ExperimentOptions& options) {
    if (n_values.empty()) throw ArgumentError("need at least one sample size");
    if (seeds < 1) throw ArgumentError("need at least one seed");
    RobustnessResult out;
    out.n_values.assign(n_values.begin(), n_values.end());
    for (std::size_t n : n_values) {
        const double theta = tuned_theta(scenario, k, n, options);
        const std::size_t burn = burn_in_index(n, k, options.burn_in_factor);
        double raw_sum = 0.0, clean_sum = 0.0, rel_sum = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const PathResult path = generate_path(scenario, n, cell_seed(options.base_seed, kEvalStream, n, static_cast<std::uint64_t>(s)));
            const Decomposition dec = decomposition_diagnostics(scenario, path);
            std::vector<double> clean(path.xs.size());
            for (std::size_t i = 0; i < clean.size(); ++i) clean[i] = path.xs[i] - dec.theta[i];

            // Same initial level for both runs so only the nuisance term differs.
            RunOptions ro;
            ro.initial_level = init_state(k, path.xs, n).v_hat;
            const auto cfg = ExtendedParams::pure(k, theta);
            const double v_raw = vn_metric(path.v_bar, run(path.xs, cfg, ro).estimates, burn);
            const double v_clean = vn_metric(path.v_bar, run(clean, cfg, ro).estimates, burn);
            raw_sum += v_raw;
            clean_sum += v_clean;
            rel_sum += std::abs(v_raw - v_clean) / v_raw;
        }
        out.vn_raw.push_back(raw_sum / seeds);
        out.vn_clean.push_back(clean_sum / seeds);
        out.relative_change.push_back(rel_sum / seeds);
    }
    return out;
}

BenchReport benchmark_report(std::span<const NamedSeries> series_set) {
    BenchReport report;
    for (const NamedSeries& series : series_set) {
        BenchRow row;
        row.name = series.name;
        row.n = series.xs.size();
        auto cell = [&](std::size_t method, auto&& tune) {
            try {
                if (series.xs.size() < 100) throw ArgumentError("benchmark series need at least 100 observations");
                row.cells[method] = tune().best_sn;
            } catch (const std::exception& e) {
                row.errors[method] = e.what();
            }
        };
        cell(0, [&] { return fit_garch(series.xs, 1, 1); });
        cell(1, [&] { return fit_garch(series.xs, 2, 2); });
        cell(2, [&] { return tune_filter0(series.xs, 0); });
        cell(3, [&] { return tune_filter1(series.xs); });
        cell(4, [&] { return tune_filter2(series.xs); });
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace voltrack
