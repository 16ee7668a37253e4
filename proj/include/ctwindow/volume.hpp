#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ctwindow {

using Extent3 = std::array<std::size_t, 3>;
using Spacing3 = std::array<double, 3>;
using Extent2 = std::array<std::size_t, 2>;

enum class ElementKind { Int16, Float32 };

const char* element_kind_name(ElementKind kind);
ElementKind parse_element_kind(const std::string& name);

std::size_t voxel_count(const Extent3& dims);

/**
 * Dense 3D CT intensity grid in Hounsfield units.
 *
 * Voxels are stored x-fastest (x, then y, then z). The element kind is either
 * int16 or float32 and is preserved by I/O. Instances are immutable after
 * construction, so sharing them across threads needs no synchronisation.
 */
class CtVolume {
public:
    CtVolume(Extent3 dims, Spacing3 spacing, std::vector<std::int16_t> voxels);
    CtVolume(Extent3 dims, Spacing3 spacing, std::vector<float> voxels);

    [[nodiscard]] const Extent3& dims() const noexcept { return dims_; }
    [[nodiscard]] const Spacing3& spacing() const noexcept { return spacing_; }
    [[nodiscard]] ElementKind kind() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept;

    /// Linear index of (x, y, z).
    [[nodiscard]] std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
        return x + dims_[0] * (y + dims_[1] * z);
    }

    /// Voxel value at a linear index, promoted to float.
    [[nodiscard]] float value(std::size_t i) const noexcept;

    /// Throws InvalidArgument when the element kind does not match.
    [[nodiscard]] std::span<const std::int16_t> int16_voxels() const;
    [[nodiscard]] std::span<const float> float_voxels() const;

    /// All voxels promoted to float32.
    [[nodiscard]] std::vector<float> to_float() const;

    friend bool operator==(const CtVolume&, const CtVolume&) = default;

private:
    Extent3 dims_;
    Spacing3 spacing_;
    std::variant<std::vector<std::int16_t>, std::vector<float>> voxels_;
};

/// Integer label grid aligned to a CtVolume. Label 0 is background.
class LabelVolume {
public:
    /// Missing entry for label 0 is filled in as "background". Every voxel
    /// value must have a name.
    LabelVolume(Extent3 dims, std::vector<std::uint8_t> voxels,
                std::map<std::uint8_t, std::string> label_names);

    [[nodiscard]] const Extent3& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t size() const noexcept { return voxels_.size(); }
    [[nodiscard]] std::span<const std::uint8_t> voxels() const noexcept { return voxels_; }
    [[nodiscard]] const std::map<std::uint8_t, std::string>& label_names() const noexcept {
        return label_names_;
    }

    friend bool operator==(const LabelVolume&, const LabelVolume&) = default;

private:
    Extent3 dims_;
    std::vector<std::uint8_t> voxels_;
    std::map<std::uint8_t, std::string> label_names_;
};

/// A 2D float plane cut from a volume. dims[0] is the fastest-varying extent.
struct Slice2D {
    Extent2 dims{};
    std::vector<float> values;
    int axis = 2;
    std::size_t index = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] float at(std::size_t i, std::size_t j) const noexcept { return values[i + dims[0] * j]; }

    friend bool operator==(const Slice2D&, const Slice2D&) = default;
};

struct LabelSlice {
    Extent2 dims{};
    std::vector<std::uint8_t> values;
    int axis = 2;
    std::size_t index = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::uint8_t at(std::size_t i, std::size_t j) const noexcept { return values[i + dims[0] * j]; }

    friend bool operator==(const LabelSlice&, const LabelSlice&) = default;
};

/// v + s for every voxel. The result is always float32.
CtVolume shift_intensity(const CtVolume& v, double s);

/// In-plane extents of a slice perpendicular to `axis`.
Extent2 slice_dims(const Extent3& dims, int axis);

Slice2D extract_slice(const CtVolume& v, int axis, std::size_t index);
LabelSlice extract_label_slice(const LabelVolume& v, int axis, std::size_t index);

/// Reassemble slices (ordered by position along `axis`) into a float32 volume.
CtVolume stack_slices(std::span<const Slice2D> slices, int axis, const Spacing3& spacing);
LabelVolume stack_label_slices(std::span<const LabelSlice> slices, int axis,
                               std::map<std::uint8_t, std::string> label_names);

} // namespace ctwindow
