#include "ctwindow/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace ctwindow::kernels::scalar {

void window(std::span<const float> in, WindowBounds b, std::span<float> out) {
    assert(in.size() == out.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        double v = in[i];
        v = std::max(v, b.lower);
        v = std::min(v, b.upper);
        out[i] = static_cast<float>((255.0 * (v - b.lower)) / b.denom);
    }
}

void add_offset(std::span<const float> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = in[i] + offset;
    }
}

void add_offset(std::span<const std::int16_t> in, float offset, std::span<float> out) {
    assert(in.size() == out.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = static_cast<float>(in[i]) + offset;
    }
}

} // namespace ctwindow::kernels::scalar
