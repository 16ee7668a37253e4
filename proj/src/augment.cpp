#include "ctwindow/augment.hpp"

#include "ctwindow/error.hpp"

#include <cmath>
#include <numbers>

namespace ctwindow {

namespace {

struct Mapping {
    double cos_t;
    double sin_t;
    double cx;
    double cy;
    double shift_x;
    double shift_y;
    double origin_x;  // crop origin relative to the unpadded frame
    double origin_y;

    // Output pixel -> source coordinate in the input slice.
    [[nodiscard]] std::pair<double, double> source(std::size_t ox, std::size_t oy) const {
        const double px = origin_x + static_cast<double>(ox) - shift_x - cx;
        const double py = origin_y + static_cast<double>(oy) - shift_y - cy;
        // Inverse rotation.
        return {cx + cos_t * px + sin_t * py, cy - sin_t * px + cos_t * py};
    }
};

float sample_bilinear(const Slice2D& img, double x, double y, float pad) {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const double fx = x - fx0;
    const double fy = y - fy0;
    const auto w = static_cast<long long>(img.dims[0]);
    const auto h = static_cast<long long>(img.dims[1]);
    const auto x0 = static_cast<long long>(fx0);
    const auto y0 = static_cast<long long>(fy0);

    auto at = [&](long long i, long long j) -> double {
        if (i < 0 || j < 0 || i >= w || j >= h) {
            return pad;
        }
        return img.values[static_cast<std::size_t>(i + w * j)];
    };

    // Zero-weight neighbours are skipped so on-grid samples are copied exactly.
    double acc = 0.0;
    const double wx[2] = {1.0 - fx, fx};
    const double wy[2] = {1.0 - fy, fy};
    for (int dj = 0; dj < 2; ++dj) {
        for (int di = 0; di < 2; ++di) {
            const double weight = wx[di] * wy[dj];
            if (weight != 0.0) {
                acc += weight * at(x0 + di, y0 + dj);
            }
        }
    }
    return static_cast<float>(acc);
}

std::uint8_t sample_nearest(const LabelSlice& lab, double x, double y, std::uint8_t pad) {
    const auto i = static_cast<long long>(std::floor(x + 0.5));
    const auto j = static_cast<long long>(std::floor(y + 0.5));
    const auto w = static_cast<long long>(lab.dims[0]);
    const auto h = static_cast<long long>(lab.dims[1]);
    if (i < 0 || j < 0 || i >= w || j >= h) {
        return pad;
    }
    return lab.values[static_cast<std::size_t>(i + w * j)];
}

} // namespace

void validate_augment_config(const AugmentConfig& cfg, const Extent2& input_dims) {
    if (!(cfg.max_rotation_deg >= 0.0) || !(cfg.max_translation[0] >= 0.0) || !(cfg.max_translation[1] >= 0.0)) {
        throw InvalidArgument("augmentation magnitudes must be non-negative");
    }
    if (cfg.crop_size[0] == 0 || cfg.crop_size[1] == 0) {
        throw InvalidArgument("crop size must be positive");
    }
    for (std::size_t a = 0; a < 2; ++a) {
        if (cfg.crop_size[a] > input_dims[a] + 2 * cfg.pad) {
            throw InvalidArgument("crop size " + std::to_string(cfg.crop_size[a]) + " exceeds padded input extent " +
                                  std::to_string(input_dims[a] + 2 * cfg.pad));
        }
    }
}

AugmentTransform draw_transform(const AugmentConfig& cfg, const Extent2& input_dims, RandomStream& stream) {
    validate_augment_config(cfg, input_dims);
    AugmentTransform t;
    t.rotation_deg = stream.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg);
    t.shift_x = stream.uniform(-cfg.max_translation[0], cfg.max_translation[0]);
    t.shift_y = stream.uniform(-cfg.max_translation[1], cfg.max_translation[1]);
    const std::size_t slack_x = input_dims[0] + 2 * cfg.pad - cfg.crop_size[0];
    const std::size_t slack_y = input_dims[1] + 2 * cfg.pad - cfg.crop_size[1];
    t.crop_x = static_cast<std::size_t>(stream.below(slack_x + 1));
    t.crop_y = static_cast<std::size_t>(stream.below(slack_y + 1));
    return t;
}

std::pair<Slice2D, LabelSlice> apply_transform(const Slice2D& img, const LabelSlice& lab,
                                               const AugmentTransform& t, const AugmentConfig& cfg) {
    if (img.dims != lab.dims || img.values.size() != lab.values.size()) {
        throw InvalidArgument("image and label slices must have identical dims");
    }
    validate_augment_config(cfg, img.dims);

    const double theta = t.rotation_deg * std::numbers::pi / 180.0;
    const Mapping map{std::cos(theta),
                      std::sin(theta),
                      (static_cast<double>(img.dims[0]) - 1.0) / 2.0,
                      (static_cast<double>(img.dims[1]) - 1.0) / 2.0,
                      t.shift_x,
                      t.shift_y,
                      static_cast<double>(t.crop_x) - static_cast<double>(cfg.pad),
                      static_cast<double>(t.crop_y) - static_cast<double>(cfg.pad)};

    Slice2D out_img;
    out_img.dims = cfg.crop_size;
    out_img.axis = img.axis;
    out_img.index = img.index;
    out_img.values.resize(cfg.crop_size[0] * cfg.crop_size[1]);
    LabelSlice out_lab;
    out_lab.dims = cfg.crop_size;
    out_lab.axis = lab.axis;
    out_lab.index = lab.index;
    out_lab.values.resize(out_img.values.size());

    for (std::size_t oy = 0; oy < cfg.crop_size[1]; ++oy) {
        for (std::size_t ox = 0; ox < cfg.crop_size[0]; ++ox) {
            const auto [sx, sy] = map.source(ox, oy);
            const std::size_t k = ox + cfg.crop_size[0] * oy;
            out_img.values[k] = sample_bilinear(img, sx, sy, cfg.pad_value_image);
            out_lab.values[k] = sample_nearest(lab, sx, sy, cfg.pad_value_label);
        }
    }
    return {std::move(out_img), std::move(out_lab)};
}

std::pair<Slice2D, LabelSlice> augment_pair(const Slice2D& img, const LabelSlice& lab, const AugmentConfig& cfg,
                                            RandomStream& stream) {
    if (img.dims != lab.dims) {
        throw InvalidArgument("image and label slices must have identical dims");
    }
    const AugmentTransform t = draw_transform(cfg, img.dims, stream);
    return apply_transform(img, lab, t, cfg);
}

} // namespace ctwindow
