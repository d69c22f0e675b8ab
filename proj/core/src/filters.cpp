#include "voltrack/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <type_traits>

#include "voltrack/errors.hpp"

namespace voltrack {
namespace {

void require_finite(double x) {
    if (!std::isfinite(x)) throw DataError("non-finite observation");
}

void check_schedule(const FilterState& state, const GainSchedule& schedule) {
    if (state.order() != schedule.k ||
        schedule.step_gains.size() != static_cast<std::size_t>(schedule.k + 1)) {
        throw ArgumentError("filter state order " + std::to_string(state.order()) +
                            " does not match gain schedule order " + std::to_string(schedule.k));
    }
}

void check_feedback(double theta, std::span<const double> a, double k_level, std::size_t n) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ArgumentError("theta must be positive and finite");
    const double limit = static_cast<double>(n) / 10.0;
    for (double c : a) {
        if (!std::isfinite(c) || c < 0.0) throw ArgumentError("feedback coefficients must be finite and >= 0");
        if (c > limit) throw ArgumentError("feedback coefficient exceeds n/10");
    }
    if (!std::isfinite(k_level) || std::abs(k_level) >= static_cast<double>(n)) {
        throw ArgumentError("level K must satisfy |K| < n");
    }
    if (std::any_of(a.begin(), a.end(), [](double c) { return c > 0.0; }) &&
        !roots_in_closed_left_half_plane(a, 1e-9)) {
        throw ArgumentError("feedback polynomial has a root with positive real part");
    }
}

// State as one vector: [v_hat, v^(1), ..., v^(k)].
std::vector<double> pack(const FilterState& s) {
    std::vector<double> v;
    v.reserve(s.derivatives.size() + 1);
    v.push_back(s.v_hat);
    v.insert(v.end(), s.derivatives.begin(), s.derivatives.end());
    return v;
}

FilterState unpack(const std::vector<double>& v, std::size_t step_index) {
    FilterState s;
    s.v_hat = v.front();
    s.derivatives.assign(v.begin() + 1, v.end());
    s.step_index = step_index;
    return s;
}

int params_order(const ExtendedParams& p) { return p.k; }
int params_order(const Filter1Params&) { return 0; }
int params_order(const Filter2Params&) { return 1; }
int params_order(const GarchParams&) { return 0; }

double params_theta(const ExtendedParams& p) { return p.theta; }
double params_theta(const Filter1Params& p) { return p.theta; }
double params_theta(const Filter2Params& p) { return p.theta; }

}  // namespace

ExtendedParams ExtendedParams::pure(int k, double theta) {
    ExtendedParams p;
    p.k = k;
    p.theta = theta;
    p.a_coeffs.assign(static_cast<std::size_t>(k + 1), 0.0);
    return p;
}

bool ExtendedParams::has_feedback() const noexcept {
    return k_level != 0.0 || std::any_of(a_coeffs.begin(), a_coeffs.end(), [](double c) { return c != 0.0; });
}

void ExtendedParams::validate(std::size_t n) const {
    if (k < 0 || k > kMaxOrder) throw ArgumentError("smoothness order out of range");
    if (!a_coeffs.empty() && a_coeffs.size() != static_cast<std::size_t>(k + 1)) {
        throw ArgumentError("a_coeffs must be empty or hold k+1 entries");
    }
    check_feedback(theta, a_coeffs, k_level, n);
}

double GarchParams::persistence() const noexcept {
    return std::accumulate(g_coeffs.begin(), g_coeffs.end(), 0.0) +
           std::accumulate(a_coeffs.begin(), a_coeffs.end(), 0.0);
}

bool GarchParams::feasible() const noexcept {
    if (p < 1 || q < 1 || g_coeffs.size() != static_cast<std::size_t>(p) ||
        a_coeffs.size() != static_cast<std::size_t>(q)) {
        return false;
    }
    if (!std::isfinite(k_const) || k_const < 0.0) return false;
    auto ok = [](double c) { return std::isfinite(c) && c >= 0.0; };
    return std::all_of(g_coeffs.begin(), g_coeffs.end(), ok) && std::all_of(a_coeffs.begin(), a_coeffs.end(), ok) &&
           persistence() < 1.0;
}

void GarchParams::validate() const {
    if (p < 1 || q < 1) throw ArgumentError("GARCH orders p, q must be >= 1");
    if (g_coeffs.size() != static_cast<std::size_t>(p) || a_coeffs.size() != static_cast<std::size_t>(q)) {
        throw ArgumentError("GARCH coefficient vectors must have lengths p and q");
    }
    auto ok = [](double c) { return std::isfinite(c) && c >= 0.0; };
    if (!ok(k_const) || !std::all_of(g_coeffs.begin(), g_coeffs.end(), ok) ||
        !std::all_of(a_coeffs.begin(), a_coeffs.end(), ok)) {
        throw ArgumentError("GARCH parameters must be finite and non-negative");
    }
    // Integrated models (persistence exactly 1) are runnable; fitting keeps to < 1.
    if (persistence() > 1.0 + 1e-12) throw ArgumentError("GARCH persistence sum(g)+sum(a) exceeds 1");
}

std::size_t warmup_length(std::size_t series_length, std::size_t available) {
    const std::size_t by_size = (series_length + 19) / 20;
    return std::max<std::size_t>(1, std::min({std::size_t{20}, by_size, available}));
}

FilterState init_state(int k, std::span<const double> warmup, std::size_t series_length) {
    if (warmup.empty()) throw ArgumentError("warmup must be non-empty");
    if (k < 0 || k > kMaxOrder) throw ArgumentError("smoothness order out of range");
    const std::size_t m = warmup_length(series_length, warmup.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(warmup[i])) throw DataError("non-finite observation in warmup", i);
        sum += warmup[i];
    }
    FilterState s;
    s.v_hat = sum / static_cast<double>(m);
    s.derivatives.assign(static_cast<std::size_t>(k), 0.0);
    return s;
}

StepResult step_pure(const FilterState& state, double x, const GainSchedule& schedule) {
    check_schedule(state, schedule);
    require_finite(x);
    const double nd = static_cast<double>(schedule.n);
    const auto& g = schedule.step_gains;
    const std::vector<double> s = pack(state);
    const std::size_t k = s.size() - 1;

    const double residual = x - s[0];
    std::vector<double> next(s.size());
    for (std::size_t j = 0; j < k; ++j) next[j] = s[j] + s[j + 1] / nd + g[j] * residual;
    next[k] = s[k] + g[k] * residual;
    return {unpack(next, state.step_index + 1), residual};
}

StepResult step_adaptive(const FilterState& state, double x, const GainSchedule& schedule, const ExtendedParams& ext) {
    check_schedule(state, schedule);
    if (ext.k != schedule.k) throw ArgumentError("extended params order does not match schedule");
    if (!ext.a_coeffs.empty() && ext.a_coeffs.size() != static_cast<std::size_t>(ext.k + 1)) {
        throw ArgumentError("a_coeffs must be empty or hold k+1 entries");
    }
    require_finite(x);
    const double nd = static_cast<double>(schedule.n);
    const auto& g = schedule.step_gains;
    const std::vector<double> s = pack(state);
    const std::size_t k = s.size() - 1;
    std::vector<double> a = ext.a_coeffs;
    a.resize(k + 1, 0.0);

    const double residual = x - s[0];
    std::vector<double> next(s.size());
    for (std::size_t j = 0; j < k; ++j) next[j] = s[j] + s[j + 1] / nd + g[j] * residual;

    double last = s[k] * (1.0 - a[0] / nd);
    for (std::size_t l = 1; l <= k; ++l) last = last - (a[l] / nd) * s[k - l];
    last = last + (a[k] * ext.k_level) / nd;
    next[k] = last + g[k] * residual;
    return {unpack(next, state.step_index + 1), residual};
}

StepResult step_filter1(const FilterState& state, double x, const GainSchedule& schedule, const Filter1Params& params) {
    if (schedule.k != 0 || state.order() != 0) throw ArgumentError("Filter 1 runs at k = 0");
    require_finite(x);
    const double nd = static_cast<double>(schedule.n);
    const double v = state.v_hat;
    const double residual = x - v;

    FilterState next;
    next.v_hat = v * (1.0 - params.a1 / nd) + (params.a1 * params.k_level) / nd + schedule.step_gains[0] * residual;
    next.step_index = state.step_index + 1;
    return {std::move(next), residual};
}

StepResult step_filter2(const FilterState& state, double x, const GainSchedule& schedule, const Filter2Params& params) {
    if (schedule.k != 1 || state.order() != 1) throw ArgumentError("Filter 2 runs at k = 1");
    require_finite(x);
    const double nd = static_cast<double>(schedule.n);
    const double v = state.v_hat;
    const double d = state.derivatives[0];
    const double residual = x - v;

    FilterState next;
    next.v_hat = v + d / nd + schedule.step_gains[0] * residual;
    next.derivatives = {d * (1.0 - params.a1 / nd) - (params.a2 / nd) * v + (params.a2 * params.k_level) / nd +
                        schedule.step_gains[1] * residual};
    next.step_index = state.step_index + 1;
    return {std::move(next), residual};
}

GarchStep step_garch(const GarchHistory& history, double x, const GarchParams& params) {
    if (params.g_coeffs.size() != static_cast<std::size_t>(params.p) ||
        params.a_coeffs.size() != static_cast<std::size_t>(params.q)) {
        throw ArgumentError("GARCH coefficient vectors must have lengths p and q");
    }
    if (history.estimates.size() < static_cast<std::size_t>(params.p) ||
        history.observations.size() + 1 < static_cast<std::size_t>(params.q)) {
        throw ArgumentError("GARCH history holds fewer than p estimates or q-1 observations");
    }
    require_finite(x);

    double v = params.k_const;
    for (int j = 0; j < params.p; ++j) v += params.g_coeffs[static_cast<std::size_t>(j)] * history.estimates[static_cast<std::size_t>(j)];
    v += params.a_coeffs[0] * x;
    for (int m = 1; m < params.q; ++m) {
        v += params.a_coeffs[static_cast<std::size_t>(m)] * history.observations[static_cast<std::size_t>(m - 1)];
    }
    return {std::max(v, 0.0), x - history.estimates[0]};
}

int config_order(const FilterConfig& config) noexcept {
    return std::visit([](const auto& p) { return params_order(p); }, config);
}

TrackResult run(std::span<const double> xs, const FilterConfig& config, const RunOptions& options) {
    if (xs.size() < 2) throw ArgumentError("need at least two observations");
    const std::size_t n = options.horizon.value_or(xs.size());
    if (n < 2) throw ArgumentError("horizon must be at least 2");

    const int k = config_order(config);
    FilterState state = init_state(k, xs, n);
    if (options.initial_level) state.v_hat = *options.initial_level;

    TrackResult out;
    out.estimates.resize(xs.size());
    out.residuals.resize(xs.size());

    auto fold = [&](auto&& step) {
        std::size_t i = 0;
        try {
            for (; i < xs.size(); ++i) {
                out.estimates[i] = state.v_hat;
                StepResult r = step(state, xs[i]);
                out.residuals[i] = r.residual;
                state = std::move(r.state);
            }
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " at index " + std::to_string(i), i);
        }
    };

    std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, GarchParams>) {
                params.validate();
                GarchHistory history;
                history.estimates.assign(static_cast<std::size_t>(params.p), state.v_hat);
                history.observations.assign(static_cast<std::size_t>(params.q - 1), state.v_hat);
                std::size_t i = 0;
                try {
                    for (; i < xs.size(); ++i) {
                        out.estimates[i] = history.estimates[0];
                        const GarchStep r = step_garch(history, xs[i], params);
                        out.residuals[i] = r.residual;
                        history.estimates.insert(history.estimates.begin(), r.estimate);
                        history.estimates.pop_back();
                        if (!history.observations.empty()) {
                            history.observations.insert(history.observations.begin(), xs[i]);
                            history.observations.pop_back();
                        }
                    }
                } catch (const DataError& e) {
                    throw DataError(std::string(e.what()) + " at index " + std::to_string(i), i);
                }
            } else {
                const GainSchedule schedule = gain_schedule(params_order(params), params_theta(params), n);
                if constexpr (std::is_same_v<T, ExtendedParams>) {
                    params.validate(n);
                    fold([&](const FilterState& s, double x) { return step_adaptive(s, x, schedule, params); });
                } else if constexpr (std::is_same_v<T, Filter1Params>) {
                    const double a[] = {params.a1};
                    check_feedback(params.theta, a, params.k_level, n);
                    fold([&](const FilterState& s, double x) { return step_filter1(s, x, schedule, params); });
                } else {
                    const double a[] = {params.a1, params.a2};
                    check_feedback(params.theta, a, params.k_level, n);
                    fold([&](const FilterState& s, double x) { return step_filter2(s, x, schedule, params); });
                }
            }
        },
        config);

    double sum = 0.0;
    for (double r : out.residuals) sum += r * r;
    out.s_n = sum / static_cast<double>(out.residuals.size());
    return out;
}

}  // namespace voltrack
