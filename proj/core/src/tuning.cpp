#include "voltrack/tuning.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "voltrack/errors.hpp"

namespace voltrack {
namespace {

constexpr std::size_t kMinTuningLength = 50;
constexpr double kInfeasible = std::numeric_limits<double>::infinity();

void check_length(std::span<const double> xs) {
    if (xs.size() < kMinTuningLength) {
        throw ArgumentError("tuning needs at least " + std::to_string(kMinTuningLength) + " observations");
    }
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Runs configs against one series and keeps every evaluation in the report.
class Recorder {
public:
    Recorder(std::span<const double> xs, TuningReport& report, const RunOptions& run)
        : xs_(xs), report_(report), run_(run) {}

    double operator()(const FilterConfig& config) {
        const double sn = run(xs_, config, run_).s_n;
        report_.evaluations.push_back({config, sn});
        if (!has_best_ || sn < report_.best_sn) {
            report_.best_sn = sn;
            report_.best_params = config;
            has_best_ = true;
        }
        return sn;
    }

    // Logs the procedure's current point. A tie with an earlier optimum keeps
    // the current point as the reported best so the trace and report agree.
    void stage(std::string name, const FilterConfig& current, double sn) {
        if (sn <= report_.best_sn) {
            report_.best_sn = sn;
            report_.best_params = current;
        }
        report_.trace.push_back({std::move(name), current, sn});
    }
    void stage(std::string name) { report_.trace.push_back({std::move(name), report_.best_params, report_.best_sn}); }

private:
    std::span<const double> xs_;
    TuningReport& report_;
    const RunOptions& run_;
    bool has_best_ = false;
};

std::size_t horizon(std::span<const double> xs, const TuningOptions& options) {
    return options.run.horizon.value_or(xs.size());
}

double a_box(std::span<const double> xs, const TuningOptions& options) {
    const double box = options.a_max.value_or(static_cast<double>(horizon(xs, options)) / 10.0);
    if (!(box >= 0.0)) throw ArgumentError("a_max must be non-negative");
    return std::min(box, static_cast<double>(horizon(xs, options)) / 10.0);
}

// Upper end of the theta search: the requested bound, pulled in just below
// the point where the discrete recursion starts to expand.
double theta_ceiling(const TuningOptions& options, int k, std::size_t n) {
    if (!(options.theta_lo > 0.0) || !(options.theta_lo < options.theta_hi)) {
        throw ArgumentError("theta range must satisfy 0 < lo < hi");
    }
    const double hi = std::min(options.theta_hi, 0.999 * discrete_theta_limit(k, n));
    if (!(hi > options.theta_lo)) {
        throw TuningError("no theta in range keeps the recursion stable at n = " + std::to_string(n));
    }
    return hi;
}

ScalarMinimum tune_theta(const TuningOptions& options, int k, std::size_t n,
                         const std::function<double(double)>& objective) {
    const double theta_hi = theta_ceiling(options, k, n);
    auto guarded = [&](double theta) {
        const StabilityReport rep = stability_report(k, theta);
        if (!rep.all_negative_real || !rep.all_distinct) {
            throw TuningError("characteristic polynomial unstable at theta = " + std::to_string(theta));
        }
        return objective(theta);
    };
    return minimize_scalar(guarded, options.theta_lo, theta_hi, options.theta_lo * 1e-4);
}

struct Coordinate {
    double* value;
    double lower;
    double upper;
    double scale;
};

// Cyclic coordinate descent: golden section on [x - h, x + h] per coordinate,
// h = fraction * max(|x|, scale), halving the fraction every cycle. Moves are
// accepted only when they lower S_n.
void polish(std::vector<Coordinate> coords, const TuningOptions& options, double& best,
            const std::function<double()>& evaluate) {
    double fraction = options.polish_fraction;
    for (int cycle = 0; cycle < options.polish_cycles; ++cycle, fraction *= 0.5) {
        for (Coordinate& c : coords) {
            const double x0 = *c.value;
            const double half = fraction * std::max(std::abs(x0), c.scale);
            const double lo = std::max(x0 - half, c.lower);
            const double hi = std::min(x0 + half, c.upper);
            if (!(hi - lo > 0.0)) continue;
            auto along = [&](double x) {
                *c.value = x;
                return evaluate();
            };
            const ScalarMinimum r = golden_section(along, lo, hi, 1e-6 * std::max(std::abs(x0), c.scale));
            if (r.min_value < best) {
                best = r.min_value;
                *c.value = r.argmin;
            } else {
                *c.value = x0;
            }
        }
    }
}

}  // namespace

TuningReport tune_filter0(std::span<const double> xs, int k, const TuningOptions& options) {
    check_length(xs);
    TuningReport report;
    Recorder record(xs, report, options.run);
    tune_theta(options, k, horizon(xs, options), [&](double theta) { return record(ExtendedParams::pure(k, theta)); });
    record.stage("theta");
    return report;
}

TuningReport tune_filter1(std::span<const double> xs, const TuningOptions& options) {
    check_length(xs);
    TuningReport report;
    Recorder record(xs, report, options.run);

    Filter1Params p;
    const ScalarMinimum stage1 = tune_theta(options, 0, horizon(xs, options), [&](double theta) {
        return record(Filter1Params{theta, 0.0, 0.0});
    });
    p.theta = stage1.argmin;
    record.stage("theta");

    p.k_level = mean_of(xs);
    double best = record(p);
    record.stage("K", p, best);

    const double box = a_box(xs, options);
    if (box > 0.0) {
        const ScalarMinimum stage3 = minimize_scalar(
            [&](double a1) { return record(Filter1Params{p.theta, a1, p.k_level}); }, 0.0, box, 1e-6 * box);
        if (stage3.min_value < best) {
            best = stage3.min_value;
            p.a1 = stage3.argmin;
        }
    }
    record.stage("a1", p, best);

    std::vector<Coordinate> coords{{&p.theta, options.theta_lo, theta_ceiling(options, 0, horizon(xs, options)), options.theta_lo}};
    if (box > 0.0) {
        const double level_scale = std::abs(p.k_level) > 0.0 ? std::abs(p.k_level) : 1.0;
        coords.push_back({&p.k_level, -static_cast<double>(horizon(xs, options)) * 0.5,
                          static_cast<double>(horizon(xs, options)) * 0.5, level_scale});
        coords.push_back({&p.a1, 0.0, box, 1.0});
    }
    polish(coords, options, best, [&] { return record(p); });
    record.stage("polish", p, best);
    return report;
}

TuningReport tune_filter2(std::span<const double> xs, const TuningOptions& options) {
    check_length(xs);
    TuningReport report;
    Recorder record(xs, report, options.run);

    Filter2Params p;
    const ScalarMinimum stage1 = tune_theta(options, 1, horizon(xs, options), [&](double theta) {
        return record(Filter2Params{theta, 0.0, 0.0, 0.0});
    });
    p.theta = stage1.argmin;
    record.stage("theta");

    p.k_level = mean_of(xs);
    double best = record(p);
    record.stage("K", p, best);

    const double box = a_box(xs, options);
    if (box > 0.0) {
        // Grid over {0} x {0} plus positive pairs, then Nelder-Mead from the best positive pair.
        std::vector<double> axis;
        for (int i = 0; i < 6; ++i) axis.push_back(box * std::pow(10.0, -4.0 + 4.0 * i / 5.0));
        double best_pair_value = kInfeasible;
        std::array<double, 2> best_pair{axis[0], axis[0]};
        for (double a1 : axis) {
            for (double a2 : axis) {
                const double v = record(Filter2Params{p.theta, a1, a2, p.k_level});
                if (v < best_pair_value) {
                    best_pair_value = v;
                    best_pair = {a1, a2};
                }
            }
        }
        auto objective = [&](std::span<const double> a) {
            if (!(a[0] > 0.0) || !(a[1] > 0.0) || a[0] > box || a[1] > box) return kInfeasible;
            return record(Filter2Params{p.theta, a[0], a[1], p.k_level});
        };
        const std::array<double, 2> steps{0.5 * best_pair[0], 0.5 * best_pair[1]};
        NelderMeadOptions nm;
        nm.max_evaluations = 400;
        nm.x_tolerance = 1e-6;
        nm.f_tolerance = 1e-12;
        const NelderMeadResult r = nelder_mead(objective, {best_pair[0], best_pair[1]}, steps, nm);
        if (r.value < best_pair_value) {
            best_pair_value = r.value;
            best_pair = {r.x[0], r.x[1]};
        }
        if (best_pair_value < best) {
            best = best_pair_value;
            p.a1 = best_pair[0];
            p.a2 = best_pair[1];
        }
    }
    record.stage("a1a2", p, best);

    std::vector<Coordinate> coords{{&p.theta, options.theta_lo, theta_ceiling(options, 1, horizon(xs, options)), options.theta_lo}};
    if (p.a1 > 0.0 && p.a2 > 0.0) {
        const double level_scale = std::abs(p.k_level) > 0.0 ? std::abs(p.k_level) : 1.0;
        const double floor = 1e-9 * box;
        coords.push_back({&p.k_level, -static_cast<double>(horizon(xs, options)) * 0.5,
                          static_cast<double>(horizon(xs, options)) * 0.5, level_scale});
        coords.push_back({&p.a1, floor, box, 1.0});
        coords.push_back({&p.a2, floor, box, 1.0});
    }
    polish(coords, options, best, [&] { return record(p); });
    record.stage("polish", p, best);
    return report;
}

std::vector<GarchParams> garch_starts(std::span<const double> xs, int p, int q, int starts) {
    if (p < 1 || p > 2 || q < 1 || q > 2) throw ArgumentError("GARCH orders must be 1 or 2");
    if (starts < 1) throw ArgumentError("need at least one start");
    const double m = xs.empty() ? 0.0 : mean_of(xs);
    static constexpr double kPersistence[] = {0.9, 0.97, 0.8, 0.5, 0.99, 0.3};
    static constexpr double kShare[] = {0.1, 0.3};

    std::vector<GarchParams> out;
    for (double persistence : kPersistence) {
        for (double share : kShare) {
            if (static_cast<int>(out.size()) == starts) return out;
            GarchParams g;
            g.p = p;
            g.q = q;
            g.k_const = std::max(0.0, m * (1.0 - persistence));
            const double a_total = persistence * share;
            const double g_total = persistence - a_total;
            g.g_coeffs = p == 1 ? std::vector<double>{g_total} : std::vector<double>{0.7 * g_total, 0.3 * g_total};
            g.a_coeffs = q == 1 ? std::vector<double>{a_total} : std::vector<double>{0.7 * a_total, 0.3 * a_total};
            out.push_back(std::move(g));
        }
    }
    return out;
}

TuningReport fit_garch(std::span<const double> xs, int p, int q, const GarchFitOptions& options) {
    if (p < 1 || p > 2 || q < 1 || q > 2) throw ArgumentError("GARCH orders must be 1 or 2");
    check_length(xs);
    TuningReport report;
    Recorder record(xs, report, options.run);

    const bool fix_g = options.fix_g_zero;
    auto unpack = [&](std::span<const double> v) {
        GarchParams g;
        g.p = p;
        g.q = q;
        g.k_const = v[0];
        std::size_t at = 1;
        g.g_coeffs.assign(static_cast<std::size_t>(p), 0.0);
        if (!fix_g) {
            for (auto& c : g.g_coeffs) c = v[at++];
        }
        g.a_coeffs.assign(v.begin() + static_cast<std::ptrdiff_t>(at), v.begin() + static_cast<std::ptrdiff_t>(at + q));
        return g;
    };
    auto objective = [&](std::span<const double> v) {
        const GarchParams g = unpack(v);
        if (!g.feasible()) return kInfeasible;
        return record(g);
    };

    const double scale = xs.empty() ? 1.0 : std::max(mean_of(xs), 1e-300);
    bool any_feasible = false;
    int start_index = 0;
    for (GarchParams start : garch_starts(xs, p, q, options.starts)) {
        if (fix_g) {
            const double total = start.persistence();
            std::fill(start.g_coeffs.begin(), start.g_coeffs.end(), 0.0);
            const double sum_a = std::accumulate(start.a_coeffs.begin(), start.a_coeffs.end(), 0.0);
            for (auto& a : start.a_coeffs) a *= total / sum_a;
        }
        ++start_index;
        if (!start.feasible()) continue;
        any_feasible = true;

        std::vector<double> x0{start.k_const};
        if (!fix_g) x0.insert(x0.end(), start.g_coeffs.begin(), start.g_coeffs.end());
        x0.insert(x0.end(), start.a_coeffs.begin(), start.a_coeffs.end());
        std::vector<double> steps(x0.size());
        steps[0] = 0.5 * std::max(x0[0], 1e-3 * scale);
        for (std::size_t i = 1; i < x0.size(); ++i) steps[i] = 0.05;

        NelderMeadResult r = nelder_mead(objective, x0, steps, options.nelder_mead);
        // One restart from the converged point recovers from collapsed simplices.
        for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = 0.1 * std::max(std::abs(r.x[i]), i == 0 ? 1e-3 * scale : 1e-3);
        const NelderMeadResult again = nelder_mead(objective, r.x, steps, options.nelder_mead);
        if (again.value <= r.value) r = again;
        if (std::isfinite(r.value)) {
            report.trace.push_back({"start " + std::to_string(start_index), unpack(r.x), r.value});
        }
    }
    if (!any_feasible || report.evaluations.empty()) throw TuningError("no feasible GARCH starting point");
    return report;
}

}  // namespace voltrack
