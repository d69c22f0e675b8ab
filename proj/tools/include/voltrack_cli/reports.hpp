#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "voltrack/eval.hpp"
#include "voltrack/tuning.hpp"

namespace voltrack::cli {

// Bumped whenever a report layout changes incompatibly.
inline constexpr int kSchemaVersion = 1;

[[nodiscard]] nlohmann::json params_json(const FilterConfig& config);
/// Inverse of params_json. Throws ParseError on an unknown kind or missing field.
[[nodiscard]] FilterConfig params_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json tuning_json(const TuningReport& report, std::string_view method, std::size_t n,
                                         double delta);
[[nodiscard]] nlohmann::json convergence_json(const ConvergenceResult& result, const Scenario& scenario);
[[nodiscard]] nlohmann::json ordering_json(const OrderingResult& result, int k, std::size_t n, int seeds);
[[nodiscard]] nlohmann::json bench_json(const BenchReport& report, double delta);

/// series,method,sn; absent cells are left out (their reason is in the JSON).
[[nodiscard]] std::string bench_csv(const BenchReport& report);
/// n,mse
[[nodiscard]] std::string convergence_csv(const ConvergenceResult& result);
/// Two whitespace-separated columns, log n and log mse, for plotting tools.
[[nodiscard]] std::string convergence_plot(const ConvergenceResult& result);
/// theta,sn,vn
[[nodiscard]] std::string ordering_csv(const OrderingResult& result);

}  // namespace voltrack::cli
