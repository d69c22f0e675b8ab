#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voltrack/filters.hpp"
#include "voltrack/optimize.hpp"

namespace voltrack {

struct Evaluation {
    FilterConfig params;
    double s_n = 0.0;
};

/// One stage of a tuning procedure and the best point known when it finished.
struct TraceEntry {
    std::string stage;
    FilterConfig params;
    double s_n = 0.0;
};

struct TuningReport {
    FilterConfig best_params;
    double best_sn = 0.0;
    std::vector<Evaluation> evaluations;
    std::vector<TraceEntry> trace;
};

inline constexpr double kThetaMin = 1e-2;
inline constexpr double kThetaMax = 1e3;

struct TuningOptions {
    double theta_lo = kThetaMin;
    double theta_hi = kThetaMax;
    // Upper end of each a-coefficient box; defaults to n/10. Zero collapses the box to {0}.
    std::optional<double> a_max;
    int polish_cycles = 3;
    double polish_fraction = 0.25;
    // Forwarded to every run(); lets experiments fix the horizon or initial level.
    RunOptions run;
};

/// theta* = argmin S_n(theta) for the pure order-k filter over [theta_lo, theta_hi].
/// Requires at least 50 observations.
[[nodiscard]] TuningReport tune_filter0(std::span<const double> xs, int k, const TuningOptions& options = {});

/// Four stages: theta (a1 = K = 0), K = mean(X), a1 over [0, a_max], then
/// cyclic coordinate descent over (theta, K, a1). Trace stages: theta, K, a1, polish.
[[nodiscard]] TuningReport tune_filter1(std::span<const double> xs, const TuningOptions& options = {});

/// Four stages: theta, K, (a1, a2) by grid + Nelder-Mead inside the Hurwitz
/// region (both positive or both zero), then coordinate-descent polish of all four.
/// Trace stages: theta, K, a1a2, polish.
[[nodiscard]] TuningReport tune_filter2(std::span<const double> xs, const TuningOptions& options = {});

struct GarchFitOptions {
    int starts = 8;
    bool fix_g_zero = false;  // collapse the g search to {0}
    NelderMeadOptions nelder_mead{};
    RunOptions run;
};

/// Least-squares GARCH(p, q), p, q in {1, 2}: multi-start Nelder-Mead under
/// K >= 0, g, a >= 0, sum(g) + sum(a) < 1. Every start is recorded in the trace.
[[nodiscard]] TuningReport fit_garch(std::span<const double> xs, int p, int q, const GarchFitOptions& options = {});

/// The deterministic starting points fit_garch uses (first `starts` of them).
[[nodiscard]] std::vector<GarchParams> garch_starts(std::span<const double> xs, int p, int q, int starts);

}  // namespace voltrack
