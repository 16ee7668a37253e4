#pragma once

// Data-parallel voxel kernels with a portable scalar reference and SIMD
// variants. The dispatcher picks the widest instruction set the running CPU
// supports; every variant produces bit-identical output to the scalar one.

#include <cstdint>
#include <span>
#include <string_view>

namespace ctwindow::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Whether this build contains the variant and the CPU can execute it.
bool isa_available(Isa isa);

/// Variant used by the dispatching entry points. Honours CTWINDOW_ISA
/// ("scalar", "avx2", "neon") when set to an available variant.
Isa active_isa();

/// Override the dispatch choice (tests and benchmarks). Throws
/// InvalidArgument when the variant is unavailable.
void set_active_isa(Isa isa);

/// Clamp-and-rescale parameters. Arithmetic runs in double and each result is
/// rounded once to float32.
struct WindowBounds {
    double lower;  // L - W
    double upper;  // L + W
    double denom;  // upper - lower
};

/// out[i] = float(255 * (clamp(in[i], lower, upper) - lower) / denom)
void window(std::span<const float> in, WindowBounds b, std::span<float> out);
/// out[i] = in[i] + offset
void add_offset(std::span<const float> in, float offset, std::span<float> out);
/// out[i] = float(in[i]) + offset
void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out);

namespace scalar {
void window(std::span<const float> in, WindowBounds b, std::span<float> out);
void add_offset(std::span<const float> in, float offset, std::span<float> out);
void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out);
} // namespace scalar

#if defined(CTWINDOW_HAVE_AVX2)
namespace avx2 {
void window(std::span<const float> in, WindowBounds b, std::span<float> out);
void add_offset(std::span<const float> in, float offset, std::span<float> out);
void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out);
} // namespace avx2
#endif

#if defined(CTWINDOW_HAVE_NEON)
namespace neon {
void window(std::span<const float> in, WindowBounds b, std::span<float> out);
void add_offset(std::span<const float> in, float offset, std::span<float> out);
void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out);
} // namespace neon
#endif

} // namespace ctwindow::kernels
