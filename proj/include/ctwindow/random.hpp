#pragma once

#include <cstdint>
#include <string_view>

namespace ctwindow {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derive an independent seed for a sub-stream (worker, subject, purpose...).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t id) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept;

/**
 * Counter-based pseudo-random stream.
 *
 * Draw k of a stream keyed by `seed` is mix64(key + (k + 1) * golden), so a
 * stream is fully determined by (seed, draw count) and never shares state with
 * another stream. Gaussians use the Box-Muller transform and consume exactly
 * two uniform draws each; no spare value is cached.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;
    double gaussian() noexcept;
    double gaussian(double mean, double stddev) noexcept;

    [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace ctwindow
