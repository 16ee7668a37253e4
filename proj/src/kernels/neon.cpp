#include "ctwindow/kernels.hpp"

#include <arm_neon.h>

#include <cassert>

namespace ctwindow::kernels::neon {

namespace {
constexpr std::size_t kLanes = 4;
}

void window(std::span<const float> in, WindowBounds b, std::span<float> out) {
    assert(in.size() == out.size());
    const float64x2_t lower = vdupq_n_f64(b.lower);
    const float64x2_t upper = vdupq_n_f64(b.upper);
    const float64x2_t denom = vdupq_n_f64(b.denom);
    const float64x2_t scale = vdupq_n_f64(255.0);

    auto half = [&](float64x2_t v) {
        // vmaxq/vminq propagate NaN; compare+select matches std::max/std::min.
        v = vbslq_f64(vcltq_f64(v, lower), lower, v);
        v = vbslq_f64(vcltq_f64(upper, v), upper, v);
        return vdivq_f64(vmulq_f64(scale, vsubq_f64(v, lower)), denom);
    };

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t v = vld1q_f32(in.data() + i);
        const float32x2_t lo = vcvt_f32_f64(half(vcvt_f64_f32(vget_low_f32(v))));
        const float32x4_t both = vcvt_high_f32_f64(lo, half(vcvt_high_f64_f32(v)));
        vst1q_f32(out.data() + i, both);
    }
    scalar::window(in.subspan(i), b, out.subspan(i));
}

void add_offset(std::span<const float> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    const float32x4_t off = vdupq_n_f32(offset);
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        vst1q_f32(out.data() + i, vaddq_f32(vld1q_f32(in.data() + i), off));
    }
    scalar::add_offset(in.subspan(i), offset, out.subspan(i));
}

void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    const float32x4_t off = vdupq_n_f32(offset);
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const int32x4_t wide = vmovl_s16(vld1_s16(in.data() + i));
        vst1q_f32(out.data() + i, vaddq_f32(vcvtq_f32_s32(wide), off));
    }
    scalar::add_offset(in.subspan(i), offset, out.subspan(i));
}

} // namespace ctwindow::kernels::neon
