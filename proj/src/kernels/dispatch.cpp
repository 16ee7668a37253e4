#include "ctwindow/error.hpp"
#include "ctwindow/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace ctwindow::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(CTWINDOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect_best() {
    if (isa_available(Isa::Avx2)) {
        return Isa::Avx2;
    }
    if (isa_available(Isa::Neon)) {
        return Isa::Neon;
    }
    return Isa::Scalar;
}

Isa initial_isa() {
    if (const char* env = std::getenv("CTWINDOW_ISA")) {
        const std::string want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == isa_name(isa) && isa_available(isa)) {
                return isa;
            }
        }
    }
    return detect_best();
}

void check_sizes(std::size_t in, std::size_t out) {
    if (in != out) {
        throw InvalidArgument("kernel input has " + std::to_string(in) + " elements but output has " +
                              std::to_string(out));
    }
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon:
#if defined(CTWINDOW_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw InvalidArgument("instruction set not available: " + std::string(isa_name(isa)));
    }
    active().store(isa, std::memory_order_relaxed);
}

void window(std::span<const float> in, WindowBounds b, std::span<float> out) {
    check_sizes(in.size(), out.size());
    switch (active_isa()) {
#if defined(CTWINDOW_HAVE_AVX2)
    case Isa::Avx2: return avx2::window(in, b, out);
#endif
#if defined(CTWINDOW_HAVE_NEON)
    case Isa::Neon: return neon::window(in, b, out);
#endif
    default: return scalar::window(in, b, out);
    }
}

void add_offset(std::span<const float> in, float offset, std::span<float> out) {
    check_sizes(in.size(), out.size());
    switch (active_isa()) {
#if defined(CTWINDOW_HAVE_AVX2)
    case Isa::Avx2: return avx2::add_offset(in, offset, out);
#endif
#if defined(CTWINDOW_HAVE_NEON)
    case Isa::Neon: return neon::add_offset(in, offset, out);
#endif
    default: return scalar::add_offset(in, offset, out);
    }
}

void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out) {
    check_sizes(in.size(), out.size());
    switch (active_isa()) {
#if defined(CTWINDOW_HAVE_AVX2)
    case Isa::Avx2: return avx2::add_offset(in, offset, out);
#endif
#if defined(CTWINDOW_HAVE_NEON)
    case Isa::Neon: return neon::add_offset(in, offset, out);
#endif
    default: return scalar::add_offset(in, offset, out);
    }
}

} // namespace ctwindow::kernels
