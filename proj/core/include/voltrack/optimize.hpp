#pragma once

#include <functional>
#include <span>
#include <vector>

namespace voltrack {

struct ScalarMinimum {
    double argmin = 0.0;
    double min_value = 0.0;
};

using ScalarObjective = std::function<double(double)>;

/// Coarse grid scan followed by golden-section refinement on the bracket
/// around the best grid point. The grid is log-spaced over [lo, hi] when
/// lo > 0; when lo <= 0 it holds lo plus points log-spaced from
/// lo + 1e-4 (hi - lo) to hi. The result never exceeds the best grid value,
/// so a monotone objective returns the endpoint itself.
/// Throws ArgumentError for lo >= hi or tol <= 0, TuningError (naming the
/// abscissa) if the objective returns NaN or infinity.
[[nodiscard]] ScalarMinimum minimize_scalar(const ScalarObjective& objective, double lo, double hi, double tol,
                                            int grid_points = 25);

/// Scalar grid used by minimize_scalar.
[[nodiscard]] std::vector<double> scan_grid(double lo, double hi, int points);

/// Golden-section search on [lo, hi] down to bracket width tol.
[[nodiscard]] ScalarMinimum golden_section(const ScalarObjective& objective, double lo, double hi, double tol);

struct NelderMeadOptions {
    int max_evaluations = 2000;
    double x_tolerance = 1e-10;  // simplex diameter, relative to max(1, |x|)
    double f_tolerance = 1e-15;  // spread of vertex values, relative to max(1e-300, |f_best|)
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

using VectorObjective = std::function<double(std::span<const double>)>;

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// The initial simplex is x0 plus x0 + step_i e_i. The objective may return
/// +infinity to mark infeasible points. Deterministic.
[[nodiscard]] NelderMeadResult nelder_mead(const VectorObjective& objective, std::vector<double> x0,
                                           std::span<const double> steps, const NelderMeadOptions& options = {});

}  // namespace voltrack
