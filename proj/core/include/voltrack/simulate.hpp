#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "voltrack/scenario.hpp"

namespace voltrack {

struct PathResult {
    std::vector<double> prices;  // n + 1 prices, prices[0] = s0
    std::vector<double> xs;      // X_i = ln^2(S_i / S_{i-1}) / delta, i = 1..n
    std::vector<double> v_bar;   // interval averages of v
    std::vector<double> mu_bar;  // interval averages of mu
    double delta = 0.0;
    std::uint64_t seed = 0;
};

/// (1/(b-a)) * integral of f over [a, b], composite Simpson with 16 panels.
template <class F>
[[nodiscard]] double interval_average(const F& f, double a, double b) {
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    double sum = f(a) + f(b);
    for (int i = 1; i < kPanels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum / (3.0 * kPanels);
}

/// Samples one path. Each log-return is drawn exactly as
/// Normal(delta (mu_bar - v_bar / 2), delta v_bar), so there is no
/// discretization bias. Throws ArgumentError for n < 2, ScenarioError when
/// the scenario is invalid or v is non-positive at a quadrature node.
[[nodiscard]] PathResult generate_path(const Scenario& scenario, std::size_t n, std::uint64_t seed);

/// X_i = ln^2(prices[i] / prices[i-1]) / delta. Throws DataError (with the
/// price index) for a non-positive or non-finite price, ArgumentError for
/// fewer than two prices or delta <= 0.
[[nodiscard]] std::vector<double> compute_heteroscedasticity(std::span<const double> prices, double delta);

/// Per-interval noise decomposition X_i = v_{i-1} + eta_i + theta_i.
struct Decomposition {
    std::vector<double> eta;
    std::vector<double> theta;     // 0.25 delta (2 mu - v)^2
    std::vector<double> sigma_sq;  // delta v (2 mu - v)^2 + 2 v^2, the variance of eta
};

[[nodiscard]] Decomposition decomposition_diagnostics(const Scenario& scenario, const PathResult& path);

}  // namespace voltrack
