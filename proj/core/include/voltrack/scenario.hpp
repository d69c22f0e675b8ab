#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace voltrack {

/// One building block of a deterministic drift or volatility function.
struct FunctionTerm {
    enum class Kind { constant, linear, sinusoid, regime_switch };

    Kind kind = Kind::constant;
    // constant: (c)                      -> c
    // linear: (c0, c1)                   -> c0 + c1 t
    // sinusoid: (base, amp, freq, phase) -> base + amp sin(2 pi freq t + phase)
    // regime_switch: (l_0..l_m, b_1..b_m) -> l_j on [b_j, b_{j+1}), b_0 = -inf
    std::vector<double> params;

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double sup_abs(double horizon) const;
    /// Lipschitz constant on [0, horizon]; infinite for regime switches with a jump.
    [[nodiscard]] double lipschitz(double horizon) const;
    [[nodiscard]] std::string to_string() const;
};

/// Sum of terms, written e.g. "sinusoid(0.1, 0.05, 1, 0) + linear(0, 0.01)".
class FunctionSpec {
public:
    FunctionSpec() = default;
    explicit FunctionSpec(std::vector<FunctionTerm> terms);

    [[nodiscard]] static FunctionSpec constant(double c);
    [[nodiscard]] static FunctionSpec sinusoid(double base, double amplitude, double frequency, double phase = 0.0);
    /// Throws ParseError on unknown kinds or wrong parameter counts.
    [[nodiscard]] static FunctionSpec parse(std::string_view text);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double sup_abs(double horizon) const;
    [[nodiscard]] double lipschitz(double horizon) const;
    [[nodiscard]] bool has_jumps() const;
    [[nodiscard]] const std::vector<FunctionTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::string to_string() const;

private:
    std::vector<FunctionTerm> terms_;
};

/**
 * Black-Scholes scenario dS = mu(t) S dt + sqrt(v(t)) S dB on [0, horizon].
 *
 * Text form, one `key = value` per line, `#` starts a comment:
 *
 *     horizon = 1
 *     s0 = 100
 *     smoothness = 0
 *     mu = constant(0.05)
 *     v = sinusoid(0.1, 0.05, 1, 0)
 *
 * horizon, s0 and smoothness are optional (defaults 1, 100, 0); mu and v are required.
 */
struct Scenario {
    FunctionSpec mu = FunctionSpec::constant(0.05);
    FunctionSpec v = FunctionSpec::constant(0.09);
    double horizon = 1.0;
    double s0 = 100.0;
    int smoothness = 0;  // declared k of v

    /// Throws ScenarioError unless v and mu are strictly positive and bounded
    /// on a dense grid of [0, horizon], and a jump scenario declares k = 0.
    void validate() const;
    /// True when v has jumps (only usable for k = 0 experiments).
    [[nodiscard]] bool lipschitz_violating() const { return v.has_jumps(); }

    [[nodiscard]] static Scenario parse(std::string_view text);
    [[nodiscard]] std::string serialize() const;
};

}  // namespace voltrack
