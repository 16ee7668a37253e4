// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// callers reach it through the dispatcher after a CPU feature check.

#include "ctwindow/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace ctwindow::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 8;
}

void window(std::span<const float> in, WindowBounds b, std::span<float> out) {
    assert(in.size() == out.size());
    const __m256d lower = _mm256_set1_pd(b.lower);
    const __m256d upper = _mm256_set1_pd(b.upper);
    const __m256d denom = _mm256_set1_pd(b.denom);
    const __m256d scale = _mm256_set1_pd(255.0);

    auto half = [&](__m128 x) {
        __m256d v = _mm256_cvtps_pd(x);
        // Operand order mirrors std::max(v, lower) / std::min(v, upper) so
        // NaN and signed-zero inputs resolve the same way as the scalar path.
        v = _mm256_max_pd(lower, v);
        v = _mm256_min_pd(upper, v);
        return _mm256_cvtpd_ps(_mm256_div_pd(_mm256_mul_pd(scale, _mm256_sub_pd(v, lower)), denom));
    };

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 v = _mm256_loadu_ps(in.data() + i);
        _mm_storeu_ps(out.data() + i, half(_mm256_castps256_ps128(v)));
        _mm_storeu_ps(out.data() + i + 4, half(_mm256_extractf128_ps(v, 1)));
    }
    scalar::window(in.subspan(i), b, out.subspan(i));
}

void add_offset(std::span<const float> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    const __m256 off = _mm256_set1_ps(offset);
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_ps(out.data() + i, _mm256_add_ps(_mm256_loadu_ps(in.data() + i), off));
    }
    scalar::add_offset(in.subspan(i), offset, out.subspan(i));
}

void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    const __m256 off = _mm256_set1_ps(offset);
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in.data() + i));
        const __m256 v = _mm256_cvtepi32_ps(_mm256_cvtepi16_epi32(raw));
        _mm256_storeu_ps(out.data() + i, _mm256_add_ps(v, off));
    }
    scalar::add_offset(in.subspan(i), offset, out.subspan(i));
}

} // namespace ctwindow::kernels::avx2
