#include "ctwindow/window.hpp"

#include "ctwindow/error.hpp"
#include "ctwindow/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ctwindow {

WindowSpec make_window(double level, double half_width) {
    if (!std::isfinite(level) || !std::isfinite(half_width)) {
        throw InvalidArgument("window level and half-width must be finite");
    }
    if (half_width < kMinHalfWidth) {
        throw InvalidArgument("window half-width must be at least " + std::to_string(kMinHalfWidth) + " HU");
    }
    return WindowSpec{level, half_width};
}

WindowSpec preset(WindowPreset which) {
    switch (which) {
    case WindowPreset::SoftTissue: return {40.0, 200.0};
    case WindowPreset::Lung: return {-400.0, 750.0};
    case WindowPreset::WholeRange: return {0.0, 1000.0};
    }
    throw InvalidArgument("unknown window preset");
}

WindowSpec preset(const std::string& name) {
    if (name == "soft_tissue") {
        return preset(WindowPreset::SoftTissue);
    }
    if (name == "lung") {
        return preset(WindowPreset::Lung);
    }
    if (name == "whole_range") {
        return preset(WindowPreset::WholeRange);
    }
    throw InvalidArgument("unknown window preset '" + name + "'");
}

const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::Stn: return "STN";
    case Strategy::Wir: return "WIR";
    case Strategy::Swn: return "SWN";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "STN") {
        return Strategy::Stn;
    }
    if (upper == "WIR") {
        return Strategy::Wir;
    }
    if (upper == "SWN") {
        return Strategy::Swn;
    }
    throw InvalidArgument("unknown normalization strategy '" + name + "' (expected STN, WIR or SWN)");
}

WindowSampler::WindowSampler(SwnParams params) : params_(params), stream_(params.seed) {
    if (!(params.sigma_level >= 0.0) || !(params.sigma_width >= 0.0) || !std::isfinite(params.sigma_level) ||
        !std::isfinite(params.sigma_width)) {
        throw InvalidArgument("SWN sigmas must be finite and non-negative");
    }
}

WindowSpec WindowSampler::sample() {
    const WindowSpec centre = preset(WindowPreset::SoftTissue);
    const double level = stream_.gaussian(centre.level, params_.sigma_level);
    double width = stream_.gaussian(centre.half_width, params_.sigma_width);
    width = std::max(std::abs(width), kMinHalfWidth);
    ++drawn_;
    return WindowSpec{level, width};
}

kernels::WindowBounds window_bounds(const WindowSpec& w) {
    const double lower = w.level - w.half_width;
    const double upper = w.level + w.half_width;
    return kernels::WindowBounds{lower, upper, upper - lower};
}

void apply_window(std::span<const float> in, const WindowSpec& w, std::span<float> out) {
    if (in.size() != out.size()) {
        throw InvalidArgument("apply_window: input and output sizes differ");
    }
    if (!(w.half_width >= kMinHalfWidth)) {
        throw InvalidArgument("apply_window: half-width below minimum");
    }
    kernels::window(in, window_bounds(w), out);
}

Slice2D apply_window(const Slice2D& s, const WindowSpec& w) {
    Slice2D out;
    out.dims = s.dims;
    out.axis = s.axis;
    out.index = s.index;
    out.values.resize(s.values.size());
    apply_window(s.values, w, out.values);
    return out;
}

Slice2D normalize_wir(const Slice2D& s) { return apply_window(s, preset(WindowPreset::WholeRange)); }

WindowSpec training_window(Strategy strategy, WindowSampler* sampler) {
    switch (strategy) {
    case Strategy::Stn: return preset(WindowPreset::SoftTissue);
    case Strategy::Wir: return preset(WindowPreset::WholeRange);
    case Strategy::Swn:
        if (sampler == nullptr) {
            throw InvalidArgument("SWN training normalization requires a window sampler");
        }
        return sampler->sample();
    }
    throw InvalidArgument("unknown strategy");
}

WindowSpec testing_window(Strategy strategy) {
    return strategy == Strategy::Wir ? preset(WindowPreset::WholeRange) : preset(WindowPreset::SoftTissue);
}

Slice2D normalize_for_training(const Slice2D& s, Strategy strategy, WindowSampler* sampler) {
    return apply_window(s, training_window(strategy, sampler));
}

Slice2D normalize_for_testing(const Slice2D& s, Strategy strategy) {
    return apply_window(s, testing_window(strategy));
}

} // namespace ctwindow
