#include "voltrack/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "voltrack/errors.hpp"

namespace voltrack {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view s) {
    s = trim(s);
    double value = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw ParseError("expected a real number, got '" + std::string(s) + "'");
    }
    return value;
}

std::string format_real(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

FunctionTerm::Kind kind_from_name(std::string_view name) {
    if (name == "constant") return FunctionTerm::Kind::constant;
    if (name == "linear") return FunctionTerm::Kind::linear;
    if (name == "sinusoid") return FunctionTerm::Kind::sinusoid;
    if (name == "regime_switch") return FunctionTerm::Kind::regime_switch;
    throw ParseError("unknown function kind '" + std::string(name) + "'");
}

std::string_view kind_name(FunctionTerm::Kind kind) {
    switch (kind) {
        case FunctionTerm::Kind::constant: return "constant";
        case FunctionTerm::Kind::linear: return "linear";
        case FunctionTerm::Kind::sinusoid: return "sinusoid";
        case FunctionTerm::Kind::regime_switch: return "regime_switch";
    }
    return "?";
}

void check_arity(const FunctionTerm& term) {
    const std::size_t n = term.params.size();
    bool ok = false;
    switch (term.kind) {
        case FunctionTerm::Kind::constant: ok = n == 1; break;
        case FunctionTerm::Kind::linear: ok = n == 2; break;
        case FunctionTerm::Kind::sinusoid: ok = n == 4; break;
        case FunctionTerm::Kind::regime_switch: {
            ok = n % 2 == 1;
            if (ok) {
                const std::size_t levels = n / 2 + 1;
                ok = std::is_sorted(term.params.begin() + static_cast<std::ptrdiff_t>(levels), term.params.end());
            }
            break;
        }
    }
    if (!ok) throw ParseError("wrong parameters for " + std::string(kind_name(term.kind)));
    for (double p : term.params) {
        if (!std::isfinite(p)) throw ParseError("non-finite parameter in " + std::string(kind_name(term.kind)));
    }
}

}  // namespace

double FunctionTerm::operator()(double t) const {
    switch (kind) {
        case Kind::constant: return params[0];
        case Kind::linear: return params[0] + params[1] * t;
        case Kind::sinusoid: return params[0] + params[1] * std::sin(2.0 * std::numbers::pi * params[2] * t + params[3]);
        case Kind::regime_switch: {
            const std::size_t levels = params.size() / 2 + 1;
            std::size_t j = 0;
            while (j + 1 < levels && t >= params[levels + j]) ++j;
            return params[j];
        }
    }
    return 0.0;
}

double FunctionTerm::sup_abs(double horizon) const {
    switch (kind) {
        case Kind::constant: return std::abs(params[0]);
        case Kind::linear: return std::max(std::abs(params[0]), std::abs(params[0] + params[1] * horizon));
        case Kind::sinusoid: return std::abs(params[0]) + std::abs(params[1]);
        case Kind::regime_switch: {
            const std::size_t levels = params.size() / 2 + 1;
            double m = 0.0;
            for (std::size_t j = 0; j < levels; ++j) m = std::max(m, std::abs(params[j]));
            return m;
        }
    }
    return 0.0;
}

double FunctionTerm::lipschitz(double horizon) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::linear: return std::abs(params[1]);
        case Kind::sinusoid: return std::abs(params[1]) * 2.0 * std::numbers::pi * std::abs(params[2]);
        case Kind::regime_switch: {
            const std::size_t levels = params.size() / 2 + 1;
            for (std::size_t j = 1; j < levels; ++j) {
                const double at = params[levels + j - 1];
                if (at > 0.0 && at < horizon && params[j] != params[j - 1]) {
                    return std::numeric_limits<double>::infinity();
                }
            }
            return 0.0;
        }
    }
    return 0.0;
}

std::string FunctionTerm::to_string() const {
    std::string out(kind_name(kind));
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ", ";
        out += format_real(params[i]);
    }
    out += ')';
    return out;
}

FunctionSpec::FunctionSpec(std::vector<FunctionTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) check_arity(t);
}

FunctionSpec FunctionSpec::constant(double c) { return FunctionSpec({{FunctionTerm::Kind::constant, {c}}}); }

FunctionSpec FunctionSpec::sinusoid(double base, double amplitude, double frequency, double phase) {
    return FunctionSpec({{FunctionTerm::Kind::sinusoid, {base, amplitude, frequency, phase}}});
}

FunctionSpec FunctionSpec::parse(std::string_view text) {
    std::vector<FunctionTerm> terms;
    std::string_view rest = trim(text);
    if (rest.empty()) throw ParseError("empty function description");
    while (!rest.empty()) {
        const auto open = rest.find('(');
        const auto close = rest.find(')');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
            throw ParseError("expected kind(params) in '" + std::string(text) + "'");
        }
        FunctionTerm term;
        term.kind = kind_from_name(trim(rest.substr(0, open)));
        std::string_view args = rest.substr(open + 1, close - open - 1);
        while (!trim(args).empty()) {
            const auto comma = args.find(',');
            term.params.push_back(parse_real(args.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            args.remove_prefix(comma + 1);
        }
        check_arity(term);
        terms.push_back(std::move(term));

        rest = trim(rest.substr(close + 1));
        if (rest.empty()) break;
        if (rest.front() != '+') throw ParseError("expected '+' between terms in '" + std::string(text) + "'");
        rest = trim(rest.substr(1));
        if (rest.empty()) throw ParseError("dangling '+' in '" + std::string(text) + "'");
    }
    return FunctionSpec(std::move(terms));
}

double FunctionSpec::operator()(double t) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term(t);
    return sum;
}

double FunctionSpec::sup_abs(double horizon) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.sup_abs(horizon);
    return sum;
}

double FunctionSpec::lipschitz(double horizon) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.lipschitz(horizon);
    return sum;
}

bool FunctionSpec::has_jumps() const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.kind == FunctionTerm::Kind::regime_switch; });
}

std::string FunctionSpec::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) out += " + ";
        out += terms_[i].to_string();
    }
    return out;
}

void Scenario::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ScenarioError("horizon must be positive");
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw ScenarioError("initial price must be positive");
    if (smoothness < 0) throw ScenarioError("smoothness must be >= 0");
    if (mu.terms().empty() || v.terms().empty()) throw ScenarioError("mu and v must both be given");
    if (smoothness > 0 && v.has_jumps()) {
        throw ScenarioError("regime_switch volatility is only valid for smoothness 0");
    }
    constexpr int kGrid = 10000;
    for (int i = 0; i <= kGrid; ++i) {
        const double t = horizon * i / kGrid;
        const double vt = v(t);
        const double mt = mu(t);
        if (!(vt > 0.0) || !std::isfinite(vt)) {
            throw ScenarioError("volatility must be strictly positive, got " + format_real(vt) + " at t=" + format_real(t));
        }
        if (!(mt > 0.0) || !std::isfinite(mt)) {
            throw ScenarioError("drift must be strictly positive, got " + format_real(mt) + " at t=" + format_real(t));
        }
    }
}

Scenario Scenario::parse(std::string_view text) {
    std::map<std::string, std::string, std::less<>> fields;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        if (!fields.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }

    Scenario s;
    for (const auto& [key, value] : fields) {
        if (key == "horizon") {
            s.horizon = parse_real(value);
        } else if (key == "s0") {
            s.s0 = parse_real(value);
        } else if (key == "smoothness") {
            const double k = parse_real(value);
            if (k != std::floor(k) || k < 0) throw ParseError("smoothness must be a non-negative integer");
            s.smoothness = static_cast<int>(k);
        } else if (key == "mu") {
            s.mu = FunctionSpec::parse(value);
        } else if (key == "v") {
            s.v = FunctionSpec::parse(value);
        } else {
            throw ParseError("unknown scenario key '" + key + "'");
        }
    }
    if (!fields.contains("mu") || !fields.contains("v")) throw ParseError("scenario needs both mu and v");
    s.validate();
    return s;
}

std::string Scenario::serialize() const {
    std::string out;
    out += "horizon = " + format_real(horizon) + "\n";
    out += "s0 = " + format_real(s0) + "\n";
    out += "smoothness = " + std::to_string(smoothness) + "\n";
    out += "mu = " + mu.to_string() + "\n";
    out += "v = " + v.to_string() + "\n";
    return out;
}

}  // namespace voltrack
