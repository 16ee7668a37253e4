#pragma once

#include "ctwindow/random.hpp"
#include "ctwindow/volume.hpp"

#include <array>
#include <cstdint>
#include <utility>

namespace ctwindow {

/// Paired spatial augmentation settings. Transform order: rotate about the
/// slice centre, translate, then crop a crop_size window out of the input
/// padded by `pad` voxels on every side.
struct AugmentConfig {
    double max_rotation_deg = 10.0;
    std::array<double, 2> max_translation{20.0, 20.0};
    Extent2 crop_size{0, 0};
    std::size_t pad = 0;
    float pad_value_image = 0.0f;
    std::uint8_t pad_value_label = 0;
    std::uint64_t seed = 0;
};

/// One concrete draw of the random transform.
struct AugmentTransform {
    double rotation_deg = 0.0;
    double shift_x = 0.0;
    double shift_y = 0.0;
    std::size_t crop_x = 0;  // origin of the crop in the padded canvas
    std::size_t crop_y = 0;
};

/// Throws InvalidArgument for negative magnitudes or a crop that does not fit
/// inside the padded input.
void validate_augment_config(const AugmentConfig& cfg, const Extent2& input_dims);

/// Draw order: rotation, shift x, shift y, crop x, crop y.
AugmentTransform draw_transform(const AugmentConfig& cfg, const Extent2& input_dims, RandomStream& stream);

/// Image resampled bilinearly, labels nearest-neighbour; samples falling outside
/// the input take the pad values.
std::pair<Slice2D, LabelSlice> apply_transform(const Slice2D& img, const LabelSlice& lab,
                                               const AugmentTransform& t, const AugmentConfig& cfg);

std::pair<Slice2D, LabelSlice> augment_pair(const Slice2D& img, const LabelSlice& lab, const AugmentConfig& cfg,
                                            RandomStream& stream);

} // namespace ctwindow
