#include "ctwindow/augment.hpp"
#include "ctwindow/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace ctwindow;

namespace {

std::pair<Slice2D, LabelSlice> ramp_pair(std::size_t w, std::size_t h) {
    Slice2D img;
    LabelSlice lab;
    img.dims = lab.dims = {w, h};
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < w; ++i) {
            img.values.push_back(static_cast<float>(i + 100 * j));
            lab.values.push_back(static_cast<std::uint8_t>((i / 3 + j / 4) % 4 + 1));
        }
    }
    return {img, lab};
}

} // namespace

TEST_CASE("identity settings leave the pair unchanged") {
    auto [img, lab] = ramp_pair(12, 9);
    AugmentConfig cfg;
    cfg.max_rotation_deg = 0.0;
    cfg.max_translation = {0.0, 0.0};
    cfg.crop_size = img.dims;
    RandomStream stream(1);
    const auto [out_img, out_lab] = augment_pair(img, lab, cfg, stream);
    CHECK(out_img.values == img.values);
    CHECK(out_lab.values == lab.values);
}

TEST_CASE("pure translation moves content and fills the vacated strip") {
    auto [img, lab] = ramp_pair(10, 6);
    AugmentConfig cfg;
    cfg.crop_size = img.dims;
    cfg.pad_value_image = -7.0f;
    cfg.pad_value_label = 0;
    const auto [out_img, out_lab] = apply_transform(img, lab, AugmentTransform{0.0, 3.0, 0.0, 0, 0}, cfg);
    for (std::size_t j = 0; j < 6; ++j) {
        for (std::size_t i = 0; i < 10; ++i) {
            if (i < 3) {
                CHECK(out_img.at(i, j) == -7.0f);
                CHECK(out_lab.at(i, j) == 0);
            } else {
                CHECK(out_img.at(i, j) == img.at(i - 3, j));
                CHECK(out_lab.at(i, j) == lab.at(i - 3, j));
            }
        }
    }
}

TEST_CASE("padding then cropping at the pad offset is the identity") {
    auto [img, lab] = ramp_pair(8, 8);
    AugmentConfig cfg;
    cfg.crop_size = img.dims;
    cfg.pad = 4;
    const auto [out_img, out_lab] = apply_transform(img, lab, AugmentTransform{0.0, 0.0, 0.0, 4, 4}, cfg);
    CHECK(out_img.values == img.values);
    CHECK(out_lab.values == lab.values);
}

TEST_CASE("crop origin selects a sub-window of the padded canvas") {
    auto [img, lab] = ramp_pair(8, 8);
    AugmentConfig cfg;
    cfg.crop_size = {3, 2};
    cfg.pad = 2;
    const auto [out_img, out_lab] = apply_transform(img, lab, AugmentTransform{0.0, 0.0, 0.0, 1, 5}, cfg);
    CHECK(out_img.dims == Extent2{3, 2});
    CHECK(out_img.at(0, 0) == cfg.pad_value_image);  // canvas x 1 -> input x -1
    CHECK(out_img.at(1, 0) == img.at(0, 3));
    CHECK(out_img.at(2, 1) == img.at(1, 4));
}

TEST_CASE("rotation by 180 degrees about the centre flips both axes") {
    auto [img, lab] = ramp_pair(7, 5);
    AugmentConfig cfg;
    cfg.crop_size = img.dims;
    const auto [out_img, out_lab] = apply_transform(img, lab, AugmentTransform{180.0, 0.0, 0.0, 0, 0}, cfg);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t i = 0; i < 7; ++i) {
            CHECK(out_img.at(i, j) == doctest::Approx(img.at(6 - i, 4 - j)).epsilon(1e-5));
            CHECK(out_lab.at(i, j) == lab.at(6 - i, 4 - j));
        }
    }
}

TEST_CASE("output labels come from the input label set or the pad label") {
    auto [img, lab] = ramp_pair(32, 24);
    AugmentConfig cfg;
    cfg.crop_size = {28, 20};
    cfg.pad = 6;
    cfg.pad_value_label = 9;
    const std::set<std::uint8_t> allowed_base(lab.values.begin(), lab.values.end());
    RandomStream stream(12345);
    for (int trial = 0; trial < 200; ++trial) {
        const auto [out_img, out_lab] = augment_pair(img, lab, cfg, stream);
        for (std::uint8_t v : out_lab.values) {
            CHECK((allowed_base.count(v) == 1 || v == 9));
        }
        CHECK(out_img.dims == cfg.crop_size);
    }
}

TEST_CASE("draws are reproducible and within bounds") {
    AugmentConfig cfg;
    cfg.crop_size = {20, 20};
    cfg.pad = 5;
    RandomStream a(3), b(3);
    for (int i = 0; i < 1000; ++i) {
        const AugmentTransform t = draw_transform(cfg, {24, 24}, a);
        const AugmentTransform u = draw_transform(cfg, {24, 24}, b);
        CHECK(t.rotation_deg == u.rotation_deg);
        CHECK(t.crop_x == u.crop_x);
        CHECK(std::fabs(t.rotation_deg) <= 10.0);
        CHECK(std::fabs(t.shift_x) <= 20.0);
        CHECK(std::fabs(t.shift_y) <= 20.0);
        CHECK(t.crop_x <= 24 + 10 - 20);
        CHECK(t.crop_y <= 24 + 10 - 20);
    }
}

TEST_CASE("augment configuration validation") {
    AugmentConfig cfg;
    cfg.crop_size = {0, 10};
    CHECK_THROWS_AS(validate_augment_config(cfg, {10, 10}), InvalidArgument);
    cfg.crop_size = {11, 10};
    CHECK_THROWS_AS(validate_augment_config(cfg, {10, 10}), InvalidArgument);
    cfg.pad = 1;
    CHECK_NOTHROW(validate_augment_config(cfg, {10, 10}));
    cfg.max_rotation_deg = -1.0;
    CHECK_THROWS_AS(validate_augment_config(cfg, {10, 10}), InvalidArgument);

    auto [img, lab] = ramp_pair(5, 5);
    lab.dims = {5, 4};
    lab.values.resize(20);
    AugmentConfig ok;
    ok.crop_size = {5, 5};
    RandomStream s(0);
    CHECK_THROWS_AS(augment_pair(img, lab, ok, s), InvalidArgument);
}
