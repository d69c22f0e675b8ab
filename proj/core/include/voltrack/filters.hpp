#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "voltrack/gains.hpp"

namespace voltrack {

/// Estimate v_hat and its k pseudo-derivative estimates after step_index observations.
struct FilterState {
    double v_hat = 0.0;
    std::vector<double> derivatives;
    std::size_t step_index = 0;

    [[nodiscard]] int order() const noexcept { return static_cast<int>(derivatives.size()); }
};

/**
 * Parameters of the extended adaptive filter of order k.
 *
 * a_coeffs holds a_1..a_{k+1}: a_1 damps the highest pseudo-derivative,
 * a_l (l >= 2) feeds back the (k+1-l)-th state, and a_{k+1} also scales the
 * pull toward the long-run level k_level. All zeros gives the pure filter.
 * Filter 1 is k=0 with (a_1, K); Filter 2 is k=1 with (a_1, a_2, K).
 */
struct ExtendedParams {
    int k = 0;
    double theta = 1.0;
    std::vector<double> a_coeffs;  // empty or length k+1; empty means all zero
    double k_level = 0.0;

    [[nodiscard]] static ExtendedParams pure(int k, double theta);
    [[nodiscard]] bool has_feedback() const noexcept;
    /// Throws ArgumentError on negative or oversized (> n/10) coefficients,
    /// |K| >= n, or a feedback polynomial with a root in the open right half plane.
    void validate(std::size_t n) const;
};

/// Literal Filter 1: v <- v (1 - a1/n) + a1 K / n + g0 (x - v).
struct Filter1Params {
    double theta = 1.0;
    double a1 = 0.0;
    double k_level = 0.0;
};

/// Literal Filter 2 (k = 1 state with damping a1, level feedback a2, level K).
struct Filter2Params {
    double theta = 1.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double k_level = 0.0;
};

/// v_i = K + sum_j g_j v_{i-j} + sum_m a_m X_{i+1-m}.
struct GarchParams {
    int p = 1;
    int q = 1;
    double k_const = 0.0;
    std::vector<double> g_coeffs;  // length p
    std::vector<double> a_coeffs;  // length q

    [[nodiscard]] double persistence() const noexcept;
    /// Fitting region: K >= 0, g, a >= 0 and persistence < 1.
    [[nodiscard]] bool feasible() const noexcept;
    /// Accepts persistence up to 1 so integrated models can be run.
    void validate() const;
};

using FilterConfig = std::variant<ExtendedParams, Filter1Params, Filter2Params, GarchParams>;

struct TrackResult {
    std::vector<double> estimates;  // estimates[i] predicts xs[i]
    std::vector<double> residuals;  // xs[i] - estimates[i]
    double s_n = 0.0;
};

struct StepResult {
    FilterState state;
    double residual = 0.0;
};

/// Most recent first: estimates[0] = v_{i-1}, observations[0] = X_{i-1}.
struct GarchHistory {
    std::vector<double> estimates;
    std::vector<double> observations;
};

struct GarchStep {
    double estimate = 0.0;
    double residual = 0.0;
};

/// Number of leading observations averaged for the initial level:
/// min(20, ceil(n/20), warmup length).
[[nodiscard]] std::size_t warmup_length(std::size_t series_length, std::size_t available);

/// v_hat = mean of the warmup prefix, derivatives zero. series_length is the
/// full sample size n the filter will run over.
[[nodiscard]] FilterState init_state(int k, std::span<const double> warmup, std::size_t series_length);

/// Pure order-k recursion (all feedback coefficients zero).
[[nodiscard]] StepResult step_pure(const FilterState& state, double x, const GainSchedule& schedule);

/// Extended recursion; reduces to step_pure when a_coeffs and k_level are zero.
[[nodiscard]] StepResult step_adaptive(const FilterState& state, double x, const GainSchedule& schedule,
                                       const ExtendedParams& ext);

/// Filter 1 and Filter 2 written out literally. Gains come from the schedule
/// (k=0 and k=1 respectively).
[[nodiscard]] StepResult step_filter1(const FilterState& state, double x, const GainSchedule& schedule,
                                      const Filter1Params& params);
[[nodiscard]] StepResult step_filter2(const FilterState& state, double x, const GainSchedule& schedule,
                                      const Filter2Params& params);

/// Estimates are floored at zero.
[[nodiscard]] GarchStep step_garch(const GarchHistory& history, double x, const GarchParams& params);

struct RunOptions {
    // Sample size used in the gain denominators; defaults to xs.size().
    std::optional<std::size_t> horizon;
    // Initial level v_hat_0; defaults to the warmup mean.
    std::optional<double> initial_level;
};

/// Folds the matching step over xs. Throws ArgumentError for fewer than two
/// observations or an invalid config, DataError (with index) for non-finite data.
[[nodiscard]] TrackResult run(std::span<const double> xs, const FilterConfig& config, const RunOptions& options = {});

/// Smoothness order of the state vector a config runs with (0 for GARCH).
[[nodiscard]] int config_order(const FilterConfig& config) noexcept;

}  // namespace voltrack
