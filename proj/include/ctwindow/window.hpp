#pragma once

// Tissue-window normalization: fixed soft-tissue (STN), whole intensity range
// (WIR) and stochastic soft-tissue windows (SWN).
//
// A window (level L, half-width W) clamps HU to [L - W, L + W] and rescales the
// band linearly onto [0, 255]:
//
//     out = 255 * (clamp(v, L - W, L + W) - (L - W)) / (2W)
//
// SWN draws L ~ N(40, x) and W ~ |N(200, y)| per slice and per epoch during
// training; at test time it uses the fixed soft-tissue window.

#include "ctwindow/kernels.hpp"
#include "ctwindow/random.hpp"
#include "ctwindow/volume.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace ctwindow {

/// Smallest admissible half-width (HU). Keeps the rescale denominator away from 0.
inline constexpr double kMinHalfWidth = 1.0;

struct WindowSpec {
    double level = 40.0;
    double half_width = 200.0;

    [[nodiscard]] double lower() const noexcept { return level - half_width; }
    [[nodiscard]] double upper() const noexcept { return level + half_width; }

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Validated construction; throws InvalidArgument when half_width < kMinHalfWidth
/// or either value is not finite.
WindowSpec make_window(double level, double half_width);

enum class WindowPreset { SoftTissue, Lung, WholeRange };

/// soft_tissue -> (40, 200), lung -> (-400, 750), whole_range -> (0, 1000).
WindowSpec preset(WindowPreset which);
/// Accepts "soft_tissue", "lung", "whole_range"; throws InvalidArgument otherwise.
WindowSpec preset(const std::string& name);

enum class Strategy { Stn, Wir, Swn };

const char* strategy_name(Strategy s);
/// Accepts "STN", "WIR", "SWN" (case-insensitive).
Strategy parse_strategy(const std::string& name);

/// Sampling coefficients for SWN: sigma of the level (x) and of the width (y).
struct SwnParams {
    double sigma_level = 0.0;
    double sigma_width = 0.0;
    std::uint64_t seed = 0;
};

/// Single-owner stream of stochastic windows. Parallel workers must each own a
/// sampler seeded with derive_seed(base_seed, worker_id).
class WindowSampler {
public:
    /// Throws InvalidArgument on negative or non-finite sigmas.
    explicit WindowSampler(SwnParams params);

    /// Level first, then width; |W| then floored at kMinHalfWidth.
    WindowSpec sample();

    [[nodiscard]] const SwnParams& params() const noexcept { return params_; }
    [[nodiscard]] std::uint64_t windows_drawn() const noexcept { return drawn_; }

private:
    SwnParams params_;
    RandomStream stream_;
    std::uint64_t drawn_ = 0;
};

inline WindowSpec sample_window(WindowSampler& sampler) { return sampler.sample(); }

/// Kernel parameters for `w`: lower L - W, upper L + W, denominator upper - lower.
kernels::WindowBounds window_bounds(const WindowSpec& w);

void apply_window(std::span<const float> in, const WindowSpec& w, std::span<float> out);
Slice2D apply_window(const Slice2D& s, const WindowSpec& w);
Slice2D normalize_wir(const Slice2D& s);

/// Window a training slice would receive: STN and WIR are fixed, SWN draws a
/// fresh window from `sampler` (required, else InvalidArgument).
WindowSpec training_window(Strategy strategy, WindowSampler* sampler);
/// Window used at test time; never random.
WindowSpec testing_window(Strategy strategy);

Slice2D normalize_for_training(const Slice2D& s, Strategy strategy, WindowSampler* sampler = nullptr);
Slice2D normalize_for_testing(const Slice2D& s, Strategy strategy);

} // namespace ctwindow
