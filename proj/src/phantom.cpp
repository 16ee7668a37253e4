#include "ctwindow/phantom.hpp"

#include "ctwindow/error.hpp"
#include "ctwindow/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace ctwindow {

void validate_phantom_config(const PhantomConfig& cfg) {
    for (std::size_t d : cfg.dims) {
        if (d == 0) {
            throw InvalidArgument("phantom dims must be positive");
        }
    }
    for (double s : cfg.spacing) {
        if (!(s > 0.0)) {
            throw InvalidArgument("phantom spacing must be positive");
        }
    }
    if (!(cfg.background_noise_std >= 0.0)) {
        throw InvalidArgument("background noise std must be non-negative");
    }
    std::set<int> ids;
    for (const auto& o : cfg.organs) {
        if (o.label_id <= 0 || o.label_id > 255) {
            throw InvalidArgument("organ label id must be in 1..255, got " + std::to_string(o.label_id));
        }
        if (!ids.insert(o.label_id).second) {
            throw InvalidArgument("duplicate organ label id " + std::to_string(o.label_id));
        }
        if (!(o.noise_std >= 0.0)) {
            throw InvalidArgument("organ '" + o.name + "' noise std must be non-negative");
        }
        for (std::size_t a = 0; a < 3; ++a) {
            if (!(o.radii[a] > 0.0)) {
                throw InvalidArgument("organ '" + o.name + "' radii must be positive");
            }
            const double hi = static_cast<double>(cfg.dims[a]) - 1.0;
            if (o.center[a] - o.radii[a] < 0.0 || o.center[a] + o.radii[a] > hi) {
                throw InvalidArgument("organ '" + o.name + "' ellipsoid extends outside the volume");
            }
        }
    }
}

Phantom generate_phantom(const PhantomConfig& cfg) {
    validate_phantom_config(cfg);
    const std::size_t n = voxel_count(cfg.dims);

    std::vector<std::uint8_t> labels(n, 0);
    std::vector<const OrganSpec*> owner(n, nullptr);
    for (const auto& o : cfg.organs) {
        // Only the bounding box of the ellipsoid needs scanning.
        std::array<std::size_t, 3> lo{}, hi{};
        for (std::size_t a = 0; a < 3; ++a) {
            lo[a] = static_cast<std::size_t>(std::max(0.0, std::ceil(o.center[a] - o.radii[a])));
            hi[a] = static_cast<std::size_t>(std::floor(o.center[a] + o.radii[a]));
        }
        for (std::size_t z = lo[2]; z <= hi[2]; ++z) {
            for (std::size_t y = lo[1]; y <= hi[1]; ++y) {
                for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
                    const double dx = (static_cast<double>(x) - o.center[0]) / o.radii[0];
                    const double dy = (static_cast<double>(y) - o.center[1]) / o.radii[1];
                    const double dz = (static_cast<double>(z) - o.center[2]) / o.radii[2];
                    if (dx * dx + dy * dy + dz * dz > 1.0) {
                        continue;
                    }
                    const std::size_t i = x + cfg.dims[0] * (y + cfg.dims[1] * z);
                    if (owner[i] != nullptr) {
                        throw InvalidArgument("organs '" + owner[i]->name + "' and '" + o.name + "' overlap");
                    }
                    owner[i] = &o;
                    labels[i] = static_cast<std::uint8_t>(o.label_id);
                }
            }
        }
    }

    RandomStream stream(cfg.seed);
    std::vector<double> hu(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = stream.gaussian();
        hu[i] = owner[i] ? owner[i]->mean_hu + owner[i]->noise_std * g : cfg.background_hu + cfg.background_noise_std * g;
    }

    std::map<std::uint8_t, std::string> names{{0, "background"}};
    for (const auto& o : cfg.organs) {
        names[static_cast<std::uint8_t>(o.label_id)] = o.name;
    }
    LabelVolume label_volume(cfg.dims, std::move(labels), std::move(names));

    if (cfg.dtype == ElementKind::Int16) {
        std::vector<std::int16_t> voxels(n);
        constexpr double lo = std::numeric_limits<std::int16_t>::min();
        constexpr double hi = std::numeric_limits<std::int16_t>::max();
        for (std::size_t i = 0; i < n; ++i) {
            voxels[i] = static_cast<std::int16_t>(std::clamp(std::nearbyint(hu[i]), lo, hi));
        }
        return Phantom{CtVolume(cfg.dims, cfg.spacing, std::move(voxels)), std::move(label_volume)};
    }
    std::vector<float> voxels(hu.begin(), hu.end());
    return Phantom{CtVolume(cfg.dims, cfg.spacing, std::move(voxels)), std::move(label_volume)};
}

PhantomConfig reference_phantom_config(std::uint64_t seed) {
    PhantomConfig cfg;
    cfg.dims = {64, 64, 16};
    cfg.spacing = {1.0, 1.0, 2.5};
    cfg.background_hu = -1000.0;
    cfg.background_noise_std = 15.0;
    cfg.seed = seed;
    // Overlapping bands resolve to the lowest label id. The 40 HU organ sits
    // between the other two and its band covers both, so it takes the highest id.
    cfg.organs = {
        {1, "vessel", {16.0, 16.0, 8.0}, {9.0, 9.0, 6.0}, 200.0, 15.0},
        {2, "fat", {47.0, 16.0, 8.0}, {9.0, 9.0, 6.0}, -120.0, 15.0},
        {3, "liver", {32.0, 46.0, 8.0}, {11.0, 9.0, 6.0}, 40.0, 15.0},
    };
    return cfg;
}

PhantomConfig jitter_phantom_config(const PhantomConfig& base, std::uint64_t seed, double jitter) {
    PhantomConfig cfg = base;
    cfg.seed = seed;
    if (jitter <= 0.0) {
        return cfg;
    }
    RandomStream stream(derive_seed(seed, "jitter"));
    const auto span = static_cast<std::uint64_t>(std::floor(jitter));
    for (auto& o : cfg.organs) {
        for (std::size_t a = 0; a < 3; ++a) {
            const double offset = static_cast<double>(stream.below(2 * span + 1)) - static_cast<double>(span);
            const double lo = o.radii[a];
            const double hi = static_cast<double>(cfg.dims[a]) - 1.0 - o.radii[a];
            o.center[a] = std::clamp(o.center[a] + offset, lo, std::max(lo, hi));
        }
    }
    return cfg;
}

} // namespace ctwindow
