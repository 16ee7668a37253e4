#include "ctwindow/random.hpp"

#include <cmath>
#include <numbers>

namespace ctwindow {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t id) noexcept {
    return mix64(mix64(base) ^ mix64(id + kGolden));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept {
    // FNV-1a over the tag, then mixed with the base seed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return derive_seed(base, h);
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

std::uint64_t RandomStream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::uint64_t RandomStream::below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; the bias is at most n / 2^64.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RandomStream::gaussian() noexcept {
    // u1 in (0, 1] keeps log() finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::gaussian(double mean, double stddev) noexcept { return mean + stddev * gaussian(); }

} // namespace ctwindow
