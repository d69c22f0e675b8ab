#include "voltrack_cli/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "voltrack/errors.hpp"

namespace voltrack::cli {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"' && trim(field).empty()) {
            field.clear();
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.emplace_back(trim(field));
    return fields;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Splits text into (1-based line number, line) pairs, skipping blank lines.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!trim(line).empty()) out.emplace_back(line_no, line);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

PriceSeries parse_prices(std::string_view text, double delta, std::string name) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("delta must be positive");
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError("empty price file (a header row is required)");

    const std::vector<std::string> header = split_row(lines[0].second, lines[0].first);
    std::vector<std::string> names;
    for (const auto& h : header) names.push_back(lower(h));
    for (const auto& h : names) {
        if (h.empty()) throw ParseError("line " + std::to_string(lines[0].first) + ": empty column name in header");
        if (parse_number(h)) {
            throw ParseError("line " + std::to_string(lines[0].first) + ": header row is missing (found a number)");
        }
    }

    std::optional<std::size_t> price_col;
    for (const char* wanted : {"price", "adjclose", "adj_close", "adj close", "close"}) {
        const auto it = std::find(names.begin(), names.end(), wanted);
        if (it != names.end()) {
            price_col = static_cast<std::size_t>(it - names.begin());
            break;
        }
    }
    if (!price_col) {
        if (names.size() > 2) throw ParseError("no price column (price, adjclose, adj_close or close) in header");
        price_col = names.size() - 1;
    }
    std::optional<std::size_t> label_col;
    if (names.size() > 1) label_col = *price_col == 0 ? 1 : 0;

    PriceSeries series;
    series.name = std::move(name);
    series.delta = delta;
    if (label_col) series.timestamps.emplace();
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto [line_no, line] = lines[r];
        const auto fields = split_row(line, line_no);
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }
        const std::string& raw = fields[*price_col];
        if (raw.empty()) throw DataError("line " + std::to_string(line_no) + ": missing price", line_no);
        const auto value = parse_number(raw);
        if (!value) throw ParseError("line " + std::to_string(line_no) + ": cannot read price '" + raw + "'");
        if (!(*value > 0.0) || !std::isfinite(*value)) {
            throw DataError("line " + std::to_string(line_no) + ": price must be positive, got " + raw, line_no);
        }
        series.prices.push_back(*value);
        if (label_col) series.timestamps->push_back(fields[*label_col]);
    }
    if (series.prices.size() < 2) throw DataError("need at least two prices");
    return series;
}

PriceSeries load_prices(const std::filesystem::path& path, double delta) {
    return parse_prices(read_file(path), delta, path.stem().string());
}

std::vector<double> Table::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ParseError("no column '" + std::string(name) + "'");
    const auto c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

Table read_table(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError("empty table '" + path.string() + "'");
    Table t;
    t.columns = split_row(lines[0].second, lines[0].first);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_row(lines[r].second, lines[r].first);
        if (fields.size() != t.columns.size()) {
            throw ParseError("line " + std::to_string(lines[r].first) + ": wrong number of fields");
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            if (f.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            const auto v = parse_number(f);
            if (!v) throw ParseError("line " + std::to_string(lines[r].first) + ": cannot read '" + f + "'");
            row.push_back(*v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::filesystem::path output_path(const std::filesystem::path& requested) {
    if (requested.is_absolute()) return requested;
    const char* dir = std::getenv("VOLTRACK_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0') return requested;
    return std::filesystem::path(dir) / requested;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw DataError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

std::string path_csv(const PathResult& path, double horizon) {
    std::string out = "t,price,x,v_bar\n";
    const std::size_t n = path.xs.size();
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = horizon * static_cast<double>(i) / static_cast<double>(n);
        out += format_double(t) + ',' + format_double(path.prices[i]) + ',';
        if (i > 0) out += format_double(path.xs[i - 1]) + ',' + format_double(path.v_bar[i - 1]);
        else out += ',';
        out += '\n';
    }
    return out;
}

std::string estimates_csv(std::span<const double> xs, std::span<const double> estimates,
                          std::span<const double> residuals) {
    std::string out = "index,x,v_hat,residual\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += std::to_string(i + 1) + ',' + format_double(xs[i]) + ',' + format_double(estimates[i]) + ',' +
               format_double(residuals[i]) + '\n';
    }
    return out;
}

}  // namespace voltrack::cli
