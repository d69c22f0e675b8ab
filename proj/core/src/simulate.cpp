#include "voltrack/simulate.hpp"

#include <cmath>
#include <string>

#include "voltrack/errors.hpp"
#include "voltrack/random.hpp"

namespace voltrack {

PathResult generate_path(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("path needs n >= 2 intervals");
    scenario.validate();

    PathResult path;
    path.seed = seed;
    path.delta = scenario.horizon / static_cast<double>(n);
    path.prices.resize(n + 1);
    path.v_bar.resize(n);
    path.mu_bar.resize(n);
    path.prices[0] = scenario.s0;

    GaussianSource normal(seed);
    const double delta = path.delta;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = scenario.horizon * static_cast<double>(i) / static_cast<double>(n);
        const double b = scenario.horizon * static_cast<double>(i + 1) / static_cast<double>(n);
        const double vb = interval_average(
            [&](double t) {
                const double vt = scenario.v(t);
                if (!(vt > 0.0)) throw ScenarioError("non-positive volatility at t=" + std::to_string(t));
                return vt;
            },
            a, b);
        const double mb = interval_average(scenario.mu, a, b);
        path.v_bar[i] = vb;
        path.mu_bar[i] = mb;

        const double log_return = delta * (mb - 0.5 * vb) + std::sqrt(delta * vb) * normal();
        path.prices[i + 1] = path.prices[i] * std::exp(log_return);
    }
    path.xs = compute_heteroscedasticity(path.prices, delta);
    return path;
}

std::vector<double> compute_heteroscedasticity(std::span<const double> prices, double delta) {
    if (prices.size() < 2) throw ArgumentError("need at least two prices");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("sampling interval must be positive");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            throw DataError("price at index " + std::to_string(i) + " is not a positive number", i);
        }
    }
    std::vector<double> xs(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const double r = std::log(prices[i] / prices[i - 1]);
        xs[i - 1] = r * r / delta;
    }
    return xs;
}

Decomposition decomposition_diagnostics(const Scenario& scenario, const PathResult& path) {
    const std::size_t n = path.xs.size();
    if (path.v_bar.size() != n || path.mu_bar.size() != n || n == 0) {
        throw ArgumentError("path is missing interval averages");
    }
    if (!(path.delta > 0.0) ||
        std::abs(path.delta * static_cast<double>(n) - scenario.horizon) > 1e-9 * scenario.horizon) {
        throw ArgumentError("path does not match scenario horizon");
    }
    Decomposition d;
    d.eta.resize(n);
    d.theta.resize(n);
    d.sigma_sq.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = path.v_bar[i];
        const double drift = 2.0 * path.mu_bar[i] - v;
        d.theta[i] = 0.25 * path.delta * drift * drift;
        d.eta[i] = path.xs[i] - v - d.theta[i];
        d.sigma_sq[i] = path.delta * v * drift * drift + 2.0 * v * v;
    }
    return d;
}

}  // namespace voltrack
