#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voltrack/scenario.hpp"

namespace voltrack {

/// First index outside the initialization boundary layer:
/// min(ceil(c n^{(2k+2)/(2k+3)}), floor(n/4)).
[[nodiscard]] std::size_t burn_in_index(std::size_t n, int k, double c = 1.0);

/// Mean of (v_true[i] - estimates[i])^2 over i >= burn_in.
[[nodiscard]] double vn_metric(std::span<const double> v_true, std::span<const double> estimates, std::size_t burn_in = 0);

/// Mean of (xs[i] - estimates[i])^2 over i >= burn_in.
[[nodiscard]] double sn_metric(std::span<const double> xs, std::span<const double> estimates, std::size_t burn_in = 0);

/// Kendall rank correlation (tau-b) between two equal-length sequences.
[[nodiscard]] double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Optimal rate exponent: -2(k+1)/(2k+3).
[[nodiscard]] double theoretical_rate_slope(int k);

struct ExperimentOptions {
    std::uint64_t base_seed = 20240601;
    double burn_in_factor = 1.0;
};

struct ConvergenceResult {
    int k = 0;
    std::vector<std::size_t> n_values;
    std::vector<double> mse_values;    // mean post-burn-in V_n per n
    std::vector<double> tuned_thetas;  // theta used at each n (tuned on a held-out path)
    double fitted_slope = 0.0;
    double theoretical_slope = 0.0;
    int seeds_per_n = 0;
};

/// For each n: tune theta on a held-out path, then average post-burn-in V_n
/// of the pure order-k filter over `seeds` fresh paths; fit the log-log slope.
[[nodiscard]] ConvergenceResult convergence_experiment(const Scenario& scenario, int k,
                                                       std::span<const std::size_t> n_values, int seeds,
                                                       const ExperimentOptions& options = {});

struct OrderingResult {
    std::vector<double> theta_grid;
    std::vector<double> sn_values;
    std::vector<double> vn_values;
    double kendall_tau = 0.0;
    bool argmin_match = false;
};

/// Builds the comparison from per-theta means (exposed for degenerate checks).
[[nodiscard]] OrderingResult make_ordering_result(std::vector<double> theta_grid, std::vector<double> sn_values,
                                                  std::vector<double> vn_values);

/// Mean S_n and V_n per theta over `seeds` common paths (post burn-in for both).
[[nodiscard]] OrderingResult ordering_agreement(const Scenario& scenario, std::span<const double> theta_grid,
                                                std::size_t n, int seeds, int k = 0,
                                                const ExperimentOptions& options = {});

struct RobustnessResult {
    std::vector<std::size_t> n_values;
    std::vector<double> vn_raw;           // mean V_n on the observed X
    std::vector<double> vn_clean;         // mean V_n with theta_i removed from X
    std::vector<double> relative_change;  // mean over seeds of |V_raw - V_clean| / V_raw
};

/// Runs the tuned pure filter on X and on X - theta_i (same paths, same theta)
/// and reports how much removing the nuisance term moves V_n.
[[nodiscard]] RobustnessResult nuisance_robustness(const Scenario& scenario, int k,
                                                   std::span<const std::size_t> n_values, int seeds,
                                                   const ExperimentOptions& options = {});

inline constexpr std::array<std::string_view, 5> kBenchMethods{"garch11", "garch22", "filter0", "filter1", "filter2"};

struct NamedSeries {
    std::string name;
    std::vector<double> xs;
};

struct BenchRow {
    std::string name;
    std::size_t n = 0;
    std::array<std::optional<double>, kBenchMethods.size()> cells;  // best S_n per method
    std::array<std::string, kBenchMethods.size()> errors;           // reason for an absent cell
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

/// Tunes every method on every series. A failing method leaves its cell empty.
[[nodiscard]] BenchReport benchmark_report(std::span<const NamedSeries> series_set);

}  // namespace voltrack
