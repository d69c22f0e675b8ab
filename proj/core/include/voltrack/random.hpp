#pragma once

#include <cstdint>
#include <random>

namespace voltrack {

/// Mixes a base seed with a stream index (SplitMix64 finalizer) so that
/// experiments can hand every (n, seed, replication) cell its own generator.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Standard normal draws from std::mt19937_64 via the Box-Muller transform.
/// Uniforms are the top 53 bits of one engine output scaled to (0, 1), so the
/// sequence for a given seed is identical on every standard library.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()();

private:
    double uniform_open();

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace voltrack
