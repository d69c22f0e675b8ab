#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <variant>
#include <vector>

#include "oracles.hpp"
#include "voltrack/errors.hpp"
#include "voltrack/optimize.hpp"
#include "voltrack/simulate.hpp"
#include "voltrack/tuning.hpp"

using namespace voltrack;

namespace {

std::vector<double> sinusoid_series(std::size_t n, std::uint64_t seed) {
    Scenario sc;
    sc.v = FunctionSpec::sinusoid(0.1, 0.05, 1.0);
    return generate_path(sc, n, seed).xs;
}

double min_evaluation(const TuningReport& r) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : r.evaluations) m = std::min(m, e.s_n);
    return m;
}

void expect_best_is_minimum(const TuningReport& r) {
    ASSERT_FALSE(r.evaluations.empty());
    EXPECT_NEAR(r.best_sn, min_evaluation(r), 1e-12);
}

void expect_report_invariants(const TuningReport& r) {
    expect_best_is_minimum(r);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].s_n, r.trace[i - 1].s_n);
    EXPECT_EQ(r.trace.back().s_n, r.best_sn);
}

std::vector<std::string> stage_names(const TuningReport& r) {
    std::vector<std::string> out;
    for (const auto& t : r.trace) out.push_back(t.stage);
    return out;
}

}  // namespace

TEST(MinimizeScalar, Quadratic) {
    const ScalarMinimum m = minimize_scalar([](double x) { return (x - 3) * (x - 3); }, 0.0, 10.0, 1e-6);
    EXPECT_NEAR(m.argmin, 3.0, 1e-6);
    EXPECT_EQ(m.min_value, (m.argmin - 3) * (m.argmin - 3));
}

TEST(MinimizeScalar, VShape) {
    const double tol = 1e-6;
    const ScalarMinimum m = minimize_scalar([](double x) { return std::abs(x - 2) + 1; }, 0.0, 8.0, tol);
    EXPECT_NEAR(m.argmin, 2.0, tol);
    EXPECT_NEAR(m.min_value, 1.0, tol);
}

TEST(MinimizeScalar, MonotoneReturnsBoundary) {
    const ScalarMinimum m = minimize_scalar([](double x) { return -x; }, 0.5, 4.0, 1e-8);
    EXPECT_EQ(m.argmin, 4.0);
    EXPECT_EQ(m.min_value, -4.0);
    const ScalarMinimum up = minimize_scalar([](double x) { return x; }, 0.0, 4.0, 1e-8);
    EXPECT_EQ(up.argmin, 0.0);
}

TEST(MinimizeScalar, NonFiniteNamesAbscissa) {
    try {
        (void)minimize_scalar([](double x) { return x > 5 ? std::nan("") : x; }, 1.0, 10.0, 1e-6);
        FAIL() << "expected TuningError";
    } catch (const TuningError& e) {
        EXPECT_NE(std::string(e.what()).find("at x = "), std::string::npos);
    }
    EXPECT_THROW((void)minimize_scalar([](double x) { return x; }, 1.0, 1.0, 1e-6), ArgumentError);
    EXPECT_THROW((void)minimize_scalar([](double x) { return x; }, 0.0, 1.0, 0.0), ArgumentError);
}

TEST(MinimizeScalar, GridShape) {
    const auto g = scan_grid(1e-2, 1e3, 25);
    ASSERT_EQ(g.size(), 25u);
    EXPECT_EQ(g.front(), 1e-2);
    EXPECT_EQ(g.back(), 1e3);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(1e5, 1.0 / 24), 1e-12);
    const auto z = scan_grid(0.0, 10.0, 25);
    EXPECT_EQ(z.front(), 0.0);
    EXPECT_TRUE(std::is_sorted(z.begin(), z.end()));
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](std::span<const double> x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); };
    const double steps[] = {0.5, 0.5};
    const NelderMeadResult r = nelder_mead(f, {-1.2, 1.0}, steps);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(NelderMead, RespectsInfeasibleRegion) {
    auto f = [](std::span<const double> x) {
        if (x[0] < 1.0) return std::numeric_limits<double>::infinity();
        return x[0] * x[0] + x[1] * x[1];
    };
    const double steps[] = {0.5, 0.5};
    const NelderMeadResult r = nelder_mead(f, {3.0, 2.0}, steps);
    EXPECT_GE(r.x[0], 1.0);
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 0.0, 1e-4);
}

TEST(TuneFilter0, ConstantSeries) {
    const std::vector<double> xs(200, 0.25);
    const TuningReport r = tune_filter0(xs, 0);
    const double theta = std::get<ExtendedParams>(r.best_params).theta;
    EXPECT_GE(theta, kThetaMin);
    EXPECT_LE(theta, kThetaMax);
    EXPECT_NEAR(r.best_sn, 0.0, 1e-20);
}

TEST(TuneFilter0, BeatsEveryGridPoint) {
    const auto xs = sinusoid_series(4000, 101);
    for (int k : {0, 1}) {
        const TuningReport r = tune_filter0(xs, k);
        expect_report_invariants(r);
        // Grid points past the discrete limit diverge and are skipped.
        int compared = 0;
        for (double theta : scan_grid(kThetaMin, kThetaMax, 25)) {
            const double sn = run(xs, ExtendedParams::pure(k, theta)).s_n;
            if (!std::isfinite(sn)) continue;
            EXPECT_LE(r.best_sn, sn);
            ++compared;
        }
        EXPECT_GE(compared, 20);
        for (const auto& e : r.evaluations) {
            const StabilityReport s = stability_report(k, std::get<ExtendedParams>(e.params).theta);
            EXPECT_TRUE(s.all_negative_real && s.all_distinct);
        }
    }
}

TEST(TuneFilter0, IidNoisePrefersHeavySmoothing) {
    const auto xs = oracle::random_series(3000, 102);
    const TuningReport r = tune_filter0(xs, 0);
    const double theta = std::get<ExtendedParams>(r.best_params).theta;
    EXPECT_LT(theta, 10.0);
    EXPECT_LE(r.best_sn, run(xs, ExtendedParams::pure(0, kThetaMin)).s_n);
    EXPECT_LE(r.best_sn, run(xs, ExtendedParams::pure(0, 0.999 * discrete_theta_limit(0, xs.size()))).s_n);
}

TEST(TuneFilter0, StaysBelowDiscreteLimit) {
    // At n = 300 the k = 0 recursion expands once theta / n^{2/3} > 2.
    const auto xs = oracle::random_series(300, 103);
    const double limit = discrete_theta_limit(0, xs.size());
    EXPECT_NEAR(limit, 2.0 * std::pow(300.0, 2.0 / 3.0), 1e-6 * limit);
    const TuningReport r = tune_filter0(xs, 0);
    for (const auto& e : r.evaluations) {
        EXPECT_LT(std::get<ExtendedParams>(e.params).theta, limit);
        EXPECT_TRUE(std::isfinite(e.s_n));
    }
}

TEST(TuneFilter0, RejectsShortSeries) {
    EXPECT_THROW((void)tune_filter0(oracle::random_series(49, 1), 0), ArgumentError);
}

TEST(TuneFilter0, MarginalIsUnimodalOnGrid) {
    int unimodal = 0;
    const int seeds = 10;
    const auto grid = scan_grid(kThetaMin, kThetaMax, 25);
    for (int s = 0; s < seeds; ++s) {
        const auto xs = sinusoid_series(2000, 200 + s);
        std::vector<double> sn;
        for (double theta : grid) sn.push_back(run(xs, ExtendedParams::pure(0, theta)).s_n);
        const auto best = std::min_element(sn.begin(), sn.end()) - sn.begin();
        int local_minima = 0;
        for (std::size_t i = 1; i + 1 < sn.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) != best && sn[i] < sn[i - 1] && sn[i] < sn[i + 1]) ++local_minima;
        }
        unimodal += local_minima == 0;
    }
    EXPECT_GE(unimodal, 9);
}

TEST(TuneFilter1, ProcedureStructure) {
    const auto xs = sinusoid_series(2000, 103);
    const TuningReport r = tune_filter1(xs);
    EXPECT_EQ(stage_names(r), (std::vector<std::string>{"theta", "K", "a1", "polish"}));
    expect_report_invariants(r);
    const TuningReport f0 = tune_filter0(xs, 0);
    EXPECT_LE(r.best_sn, f0.best_sn);
    EXPECT_EQ(r.trace[0].s_n, f0.best_sn);
    double mean = 0.0;
    for (double x : xs) mean += x;
    EXPECT_EQ(std::get<Filter1Params>(r.trace[1].params).k_level, mean / xs.size());
    for (const auto& e : r.evaluations) {
        const auto& p = std::get<Filter1Params>(e.params);
        EXPECT_GE(p.a1, 0.0);
        EXPECT_LE(p.a1, xs.size() / 10.0);
    }
}

TEST(TuneFilter1, ConstantSeriesLevel) {
    const std::vector<double> xs(100, 0.125);
    const TuningReport r = tune_filter1(xs);
    EXPECT_EQ(std::get<Filter1Params>(r.trace[1].params).k_level, 0.125);
    EXPECT_NEAR(r.best_sn, 0.0, 1e-20);
}

TEST(TuneFilter1, Deterministic) {
    const auto xs = sinusoid_series(1000, 104);
    const TuningReport a = tune_filter1(xs), b = tune_filter1(xs);
    ASSERT_EQ(a.evaluations.size(), b.evaluations.size());
    EXPECT_EQ(a.best_sn, b.best_sn);
    const auto& pa = std::get<Filter1Params>(a.best_params);
    const auto& pb = std::get<Filter1Params>(b.best_params);
    EXPECT_EQ(pa.theta, pb.theta);
    EXPECT_EQ(pa.a1, pb.a1);
    EXPECT_EQ(pa.k_level, pb.k_level);
}

TEST(TuneFilter2, ProcedureStructure) {
    const auto xs = sinusoid_series(2000, 105);
    const TuningReport r = tune_filter2(xs);
    EXPECT_EQ(stage_names(r), (std::vector<std::string>{"theta", "K", "a1a2", "polish"}));
    expect_report_invariants(r);
    for (const auto& e : r.evaluations) {
        const auto& p = std::get<Filter2Params>(e.params);
        EXPECT_TRUE((p.a1 > 0 && p.a2 > 0) || (p.a1 == 0 && p.a2 == 0));
        EXPECT_LE(std::max(p.a1, p.a2), xs.size() / 10.0);
    }
}

TEST(TuneFilter2, ConstantSeriesLevel) {
    const std::vector<double> xs(100, 0.375);
    const TuningReport r = tune_filter2(xs);
    EXPECT_EQ(std::get<Filter2Params>(r.trace[1].params).k_level, 0.375);
}

TEST(TuneFilter2, CollapsedBoxesReduceToOrderOne) {
    const auto xs = sinusoid_series(1500, 106);
    TuningOptions opt;
    opt.a_max = 0.0;
    const TuningReport r = tune_filter2(xs, opt);
    const TuningReport f0 = tune_filter0(xs, 1);
    const auto& p = std::get<Filter2Params>(r.best_params);
    EXPECT_EQ(p.a1, 0.0);
    EXPECT_EQ(p.a2, 0.0);
    EXPECT_EQ(r.trace[0].s_n, f0.best_sn);
    EXPECT_LE(r.best_sn, f0.best_sn);
    EXPECT_LT((f0.best_sn - r.best_sn) / f0.best_sn, 1e-6);
}

TEST(FitGarch, RecoversNoiselessRecursion) {
    // X_{i+1} = K + (g + a) X_i approaches K / (1 - g - a) from slightly off.
    const double K = 0.01, g = 0.85, a = 0.1;
    std::vector<double> xs{K / (1 - g - a) + 1e-3};
    while (xs.size() < 2000) xs.push_back(K + (g + a) * xs.back());
    const TuningReport r = fit_garch(xs, 1, 1);
    EXPECT_LT(r.best_sn, 1e-10);
    expect_best_is_minimum(r);
}

TEST(FitGarch, EveryEvaluationFeasible) {
    const auto xs = sinusoid_series(800, 107);
    for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 2}}) {
        const TuningReport r = fit_garch(xs, p, q);
        EXPECT_EQ(r.trace.size(), 8u);
        for (const auto& e : r.evaluations) EXPECT_TRUE(std::get<GarchParams>(e.params).feasible());
        expect_best_is_minimum(r);
    }
}

TEST(FitGarch, FixedGIsLinearRegression) {
    // AR(1)-type series; with g = 0 the predictor is K + a X_i.
    std::mt19937_64 rng(108);
    std::exponential_distribution<double> e(50.0);
    std::vector<double> xs{0.05};
    while (xs.size() < 1000) xs.push_back(0.02 + 0.5 * xs.back() + e(rng));

    // Closed-form OLS of X_{i+1} on X_i over the pairs the filter sees.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        sx += xs[i];
        sy += xs[i + 1];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * xs[i + 1];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;

    GarchFitOptions opt;
    opt.fix_g_zero = true;
    const TuningReport r = fit_garch(xs, 1, 1, opt);
    const auto& best = std::get<GarchParams>(r.best_params);
    EXPECT_EQ(best.g_coeffs[0], 0.0);
    EXPECT_NEAR(best.a_coeffs[0], slope, 1e-4);
    EXPECT_NEAR(best.k_const, intercept, 1e-5);
    const double ols_sn = run(xs, GarchParams{1, 1, intercept, {0.0}, {slope}}).s_n;
    EXPECT_LE(r.best_sn, ols_sn * (1 + 1e-9));
}

TEST(FitGarch, MoreStartsNeverWorse) {
    for (std::uint64_t seed : {109u, 110u, 111u}) {
        const auto xs = sinusoid_series(600, seed);
        GarchFitOptions one;
        one.starts = 1;
        EXPECT_LE(fit_garch(xs, 1, 1).best_sn, fit_garch(xs, 1, 1, one).best_sn);
    }
}

TEST(FitGarch, RejectsUnsupportedOrders) {
    const auto xs = oracle::random_series(100, 1);
    EXPECT_THROW((void)fit_garch(xs, 3, 1), ArgumentError);
    EXPECT_THROW((void)fit_garch(xs, 1, 0), ArgumentError);
}
