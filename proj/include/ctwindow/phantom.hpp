#pragma once

#include "ctwindow/volume.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ctwindow {

struct OrganSpec {
    int label_id = 1;
    std::string name;
    std::array<double, 3> center{};  // voxel coordinates
    std::array<double, 3> radii{};   // semi-axes in voxels
    double mean_hu = 40.0;
    double noise_std = 0.0;
};

struct PhantomConfig {
    Extent3 dims{64, 64, 16};
    Spacing3 spacing{1.0, 1.0, 1.0};
    std::vector<OrganSpec> organs;
    double background_hu = -1000.0;
    double background_noise_std = 0.0;
    ElementKind dtype = ElementKind::Int16;
    std::uint64_t seed = 0;
};

/// Ground-truth labelled image.
struct Phantom {
    CtVolume image;
    LabelVolume labels;
};

/// A phantom with an identifier, as used in training and test sets.
struct Subject {
    std::string id;
    Phantom data;
};

/// Throws InvalidArgument: zero dims, bad spacing, duplicate/zero/oversized
/// label ids, non-positive radii, ellipsoid not inside the grid, negative noise.
void validate_phantom_config(const PhantomConfig& cfg);

/**
 * Axis-aligned ellipsoid organs on a uniform background.
 *
 * A voxel (x, y, z) belongs to an organ when
 * sum(((p - center) / radii)^2) <= 1. Intensities are drawn from
 * N(mean_hu, noise_std), one Gaussian per voxel in x-fastest order from a
 * stream seeded by cfg.seed; int16 output is rounded to nearest. A voxel inside
 * two organs is rejected with InvalidArgument.
 */
Phantom generate_phantom(const PhantomConfig& cfg);

/// Three organs inside the soft-tissue band on an air background, noise 15 HU:
/// 1 "vessel" (200 HU), 2 "fat" (-120 HU), 3 "liver" (40 HU).
PhantomConfig reference_phantom_config(std::uint64_t seed);

/// Copy of `base` whose organ centres are moved by up to `jitter` voxels per
/// axis, drawn from `seed`, which also becomes the noise seed.
PhantomConfig jitter_phantom_config(const PhantomConfig& base, std::uint64_t seed, double jitter);

} // namespace ctwindow
