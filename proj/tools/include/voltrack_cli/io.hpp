#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voltrack/simulate.hpp"

namespace voltrack::cli {

inline constexpr double kTradingDaysDelta = 1.0 / 252.0;

struct PriceSeries {
    std::string name;
    std::optional<std::vector<std::string>> timestamps;
    std::vector<double> prices;
    double delta = kTradingDaysDelta;
};

/**
 * Reads a price CSV. The header row is required. Accepted layouts:
 *
 *   price                  one column of prices
 *   date,price             label column then price column (any header names)
 *   ...,close,...          any width; the price column is the one named
 *                          price, adjclose, adj_close, adj close or close
 *                          (case-insensitive, first match in that order)
 *
 * With more than one column the first non-price column supplies timestamps.
 * Blank lines are skipped and fields may be wrapped in double quotes.
 * Throws DataError naming the 1-based line for an empty, zero or negative
 * price, ParseError for a malformed row or unreadable number, and
 * ArgumentError for delta <= 0.
 */
[[nodiscard]] PriceSeries load_prices(const std::filesystem::path& path, double delta);
[[nodiscard]] PriceSeries parse_prices(std::string_view text, double delta, std::string name = "series");

/// Numeric CSV as written by this tool: header names plus rows of doubles
/// (empty fields become NaN).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    [[nodiscard]] std::vector<double> column(std::string_view name) const;
};
[[nodiscard]] Table read_table(const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

/// Resolves a relative output path against $VOLTRACK_OUTPUT_DIR when set.
[[nodiscard]] std::filesystem::path output_path(const std::filesystem::path& requested);

/// Writes to a sibling temporary file, then renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// t,price,x,v_bar. Row 0 holds the initial price with x and v_bar empty.
[[nodiscard]] std::string path_csv(const PathResult& path, double horizon);

/// index,x,v_hat,residual with 1-based observation indices.
[[nodiscard]] std::string estimates_csv(std::span<const double> xs, std::span<const double> estimates,
                                        std::span<const double> residuals);

}  // namespace voltrack::cli
