#include "voltrack/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "voltrack/errors.hpp"

namespace voltrack {
namespace {

double checked(const ScalarObjective& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "objective returned " << v << " at x = " << x;
        throw TuningError(msg.str());
    }
    return v;
}

}  // namespace

std::vector<double> scan_grid(double lo, double hi, int points) {
    if (!(lo < hi)) throw ArgumentError("scan grid needs lo < hi");
    if (points < 3) throw ArgumentError("scan grid needs at least 3 points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    double start = lo;
    int log_points = points;
    if (lo <= 0.0) {
        grid.push_back(lo);
        start = lo + 1e-4 * (hi - lo);
        --log_points;
    }
    // Offsets from lo are log-spaced when lo <= 0 so the grid stays above lo.
    const double base = lo <= 0.0 ? lo : 0.0;
    const double log_lo = std::log(start - base);
    const double log_hi = std::log(hi - base);
    for (int i = 0; i < log_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(log_points - 1);
        grid.push_back(base + std::exp(log_lo + t * (log_hi - log_lo)));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

ScalarMinimum golden_section(const ScalarObjective& objective, double lo, double hi, double tol) {
    if (!(lo < hi)) throw ArgumentError("golden section needs lo < hi");
    if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = checked(objective, c);
    double fd = checked(objective, d);
    ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = checked(objective, c);
            if (fc < best.min_value) best = {c, fc};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = checked(objective, d);
            if (fd < best.min_value) best = {d, fd};
        }
    }
    return best;
}

ScalarMinimum minimize_scalar(const ScalarObjective& objective, double lo, double hi, double tol, int grid_points) {
    if (!(lo < hi)) throw ArgumentError("minimize_scalar needs lo < hi");
    if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
    const std::vector<double> grid = scan_grid(lo, hi, grid_points);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = checked(objective, grid[i]);

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best = static_cast<std::size_t>(best_it - values.begin());
    ScalarMinimum result{grid[best], *best_it};

    const double left = grid[best == 0 ? 0 : best - 1];
    const double right = grid[std::min(best + 1, grid.size() - 1)];
    if (right - left > tol) {
        const ScalarMinimum refined = golden_section(objective, left, right, tol);
        if (refined.min_value < result.min_value) result = refined;
    }
    return result;
}

NelderMeadResult nelder_mead(const VectorObjective& objective, std::vector<double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    if (dim == 0 || steps.size() != dim) throw ArgumentError("Nelder-Mead needs matching, non-empty x0 and steps");

    NelderMeadResult out;
    auto eval = [&](const std::vector<double>& x) {
        ++out.evaluations;
        const double v = objective(x);
        if (std::isnan(v)) return std::numeric_limits<double>::infinity();
        return v;
    };

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> fvals(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fvals[i] = eval(simplex[i]);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);

    auto point_along = [&](double coef, std::vector<double>& dst, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < dim; ++j) dst[j] = centroid[j] + coef * (worst[j] - centroid[j]);
    };

    while (out.evaluations < options.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return fvals[x] < fvals[y]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        double diameter = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i <= dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
                scale = std::max(scale, std::abs(simplex[best][j]));
            }
        }
        const double spread = fvals[worst] - fvals[best];
        if (std::isfinite(spread) && diameter <= options.x_tolerance * scale &&
            spread <= options.f_tolerance * std::max(1e-300, std::abs(fvals[best]))) {
            break;
        }
        if (std::isfinite(spread) && spread == 0.0 && diameter <= options.x_tolerance * scale) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        point_along(-1.0, trial, simplex[worst]);
        const double f_reflect = eval(trial);
        if (f_reflect < fvals[best]) {
            point_along(-2.0, trial2, simplex[worst]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                fvals[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                fvals[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < fvals[second_worst]) {
            simplex[worst] = trial;
            fvals[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < fvals[worst];
        point_along(outside ? -0.5 : 0.5, trial2, simplex[worst]);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : fvals[worst])) {
            simplex[worst] = trial2;
            fvals[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < dim; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            fvals[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(fvals.begin(), fvals.end());
    out.x = simplex[static_cast<std::size_t>(best_it - fvals.begin())];
    out.value = *best_it;
    return out;
}

}  // namespace voltrack
