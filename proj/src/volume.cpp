#include "ctwindow/volume.hpp"

#include "ctwindow/error.hpp"
#include "ctwindow/kernels.hpp"

#include <cmath>
#include <string>

namespace ctwindow {

namespace {

void validate_geometry(const Extent3& dims, const Spacing3& spacing, std::size_t n) {
    for (std::size_t d : dims) {
        if (d == 0) {
            throw InvalidArgument("volume dims must be positive");
        }
    }
    for (double s : spacing) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InvalidArgument("volume spacing must be positive and finite");
        }
    }
    if (n != voxel_count(dims)) {
        throw InvalidArgument("voxel count " + std::to_string(n) + " does not match dims product " +
                              std::to_string(voxel_count(dims)));
    }
}

void check_axis(int axis) {
    if (axis < 0 || axis > 2) {
        throw InvalidArgument("axis must be 0, 1 or 2");
    }
}

// Linear index of in-plane position (i, j) on slice `index` along `axis`.
std::size_t plane_index(const Extent3& dims, int axis, std::size_t index, std::size_t i, std::size_t j) {
    std::size_t x = 0, y = 0, z = 0;
    switch (axis) {
    case 0: x = index; y = i; z = j; break;
    case 1: x = i; y = index; z = j; break;
    default: x = i; y = j; z = index; break;
    }
    return x + dims[0] * (y + dims[1] * z);
}

template <typename T>
std::vector<T> gather_plane(std::span<const T> voxels, const Extent3& dims, int axis, std::size_t index) {
    const Extent2 pd = slice_dims(dims, axis);
    std::vector<T> out(pd[0] * pd[1]);
    if (axis == 2) {
        const std::size_t offset = index * pd[0] * pd[1];
        std::copy_n(voxels.begin() + static_cast<std::ptrdiff_t>(offset), out.size(), out.begin());
        return out;
    }
    for (std::size_t j = 0; j < pd[1]; ++j) {
        for (std::size_t i = 0; i < pd[0]; ++i) {
            out[i + pd[0] * j] = voxels[plane_index(dims, axis, index, i, j)];
        }
    }
    return out;
}

template <typename SliceT, typename T>
std::vector<T> scatter_planes(std::span<const SliceT> slices, int axis, Extent3& dims_out) {
    check_axis(axis);
    if (slices.empty()) {
        throw InvalidArgument("cannot stack an empty slice list");
    }
    const Extent2 pd = slices.front().dims;
    Extent3 dims{};
    switch (axis) {
    case 0: dims = {slices.size(), pd[0], pd[1]}; break;
    case 1: dims = {pd[0], slices.size(), pd[1]}; break;
    default: dims = {pd[0], pd[1], slices.size()}; break;
    }
    std::vector<T> voxels(voxel_count(dims));
    for (std::size_t k = 0; k < slices.size(); ++k) {
        const auto& s = slices[k];
        if (s.dims != pd || s.values.size() != pd[0] * pd[1]) {
            throw InvalidArgument("slices to stack have inconsistent dims");
        }
        for (std::size_t j = 0; j < pd[1]; ++j) {
            for (std::size_t i = 0; i < pd[0]; ++i) {
                voxels[plane_index(dims, axis, k, i, j)] = s.values[i + pd[0] * j];
            }
        }
    }
    dims_out = dims;
    return voxels;
}

} // namespace

const char* element_kind_name(ElementKind kind) {
    return kind == ElementKind::Int16 ? "int16" : "float32";
}

ElementKind parse_element_kind(const std::string& name) {
    if (name == "int16") {
        return ElementKind::Int16;
    }
    if (name == "float32") {
        return ElementKind::Float32;
    }
    throw FormatError("unknown element kind '" + name + "'");
}

std::size_t voxel_count(const Extent3& dims) { return dims[0] * dims[1] * dims[2]; }

CtVolume::CtVolume(Extent3 dims, Spacing3 spacing, std::vector<std::int16_t> voxels)
    : dims_(dims), spacing_(spacing) {
    validate_geometry(dims_, spacing_, voxels.size());
    voxels_ = std::move(voxels);
}

CtVolume::CtVolume(Extent3 dims, Spacing3 spacing, std::vector<float> voxels)
    : dims_(dims), spacing_(spacing) {
    validate_geometry(dims_, spacing_, voxels.size());
    voxels_ = std::move(voxels);
}

ElementKind CtVolume::kind() const noexcept {
    return std::holds_alternative<std::vector<std::int16_t>>(voxels_) ? ElementKind::Int16 : ElementKind::Float32;
}

std::size_t CtVolume::size() const noexcept {
    return std::visit([](const auto& v) { return v.size(); }, voxels_);
}

float CtVolume::value(std::size_t i) const noexcept {
    return std::visit([i](const auto& v) { return static_cast<float>(v[i]); }, voxels_);
}

std::span<const std::int16_t> CtVolume::int16_voxels() const {
    if (const auto* v = std::get_if<std::vector<std::int16_t>>(&voxels_)) {
        return *v;
    }
    throw InvalidArgument("volume element kind is float32, not int16");
}

std::span<const float> CtVolume::float_voxels() const {
    if (const auto* v = std::get_if<std::vector<float>>(&voxels_)) {
        return *v;
    }
    throw InvalidArgument("volume element kind is int16, not float32");
}

std::vector<float> CtVolume::to_float() const {
    std::vector<float> out(size());
    if (kind() == ElementKind::Int16) {
        kernels::add_offset(int16_voxels(), 0.0f, out);
    } else {
        const auto src = float_voxels();
        std::copy(src.begin(), src.end(), out.begin());
    }
    return out;
}

LabelVolume::LabelVolume(Extent3 dims, std::vector<std::uint8_t> voxels,
                         std::map<std::uint8_t, std::string> label_names)
    : dims_(dims), voxels_(std::move(voxels)), label_names_(std::move(label_names)) {
    validate_geometry(dims_, {1.0, 1.0, 1.0}, voxels_.size());
    label_names_.try_emplace(0, "background");
    std::array<bool, 256> seen{};
    for (std::uint8_t v : voxels_) {
        seen[v] = true;
    }
    for (std::size_t id = 0; id < seen.size(); ++id) {
        if (seen[id] && !label_names_.contains(static_cast<std::uint8_t>(id))) {
            throw InvalidArgument("label id " + std::to_string(id) + " has no name");
        }
    }
}

CtVolume shift_intensity(const CtVolume& v, double s) {
    if (!std::isfinite(s)) {
        throw InvalidArgument("intensity shift must be finite");
    }
    std::vector<float> out(v.size());
    const auto offset = static_cast<float>(s);
    if (v.kind() == ElementKind::Int16) {
        kernels::add_offset(v.int16_voxels(), offset, out);
    } else {
        kernels::add_offset(v.float_voxels(), offset, out);
    }
    return CtVolume(v.dims(), v.spacing(), std::move(out));
}

Extent2 slice_dims(const Extent3& dims, int axis) {
    check_axis(axis);
    switch (axis) {
    case 0: return {dims[1], dims[2]};
    case 1: return {dims[0], dims[2]};
    default: return {dims[0], dims[1]};
    }
}

Slice2D extract_slice(const CtVolume& v, int axis, std::size_t index) {
    check_axis(axis);
    if (index >= v.dims()[static_cast<std::size_t>(axis)]) {
        throw OutOfRange("slice index " + std::to_string(index) + " out of range for axis " +
                         std::to_string(axis));
    }
    Slice2D s;
    s.dims = slice_dims(v.dims(), axis);
    s.axis = axis;
    s.index = index;
    if (v.kind() == ElementKind::Int16) {
        const auto plane = gather_plane(v.int16_voxels(), v.dims(), axis, index);
        s.values.resize(plane.size());
        kernels::add_offset(std::span<const std::int16_t>(plane), 0.0f, s.values);
    } else {
        s.values = gather_plane(v.float_voxels(), v.dims(), axis, index);
    }
    return s;
}

LabelSlice extract_label_slice(const LabelVolume& v, int axis, std::size_t index) {
    check_axis(axis);
    if (index >= v.dims()[static_cast<std::size_t>(axis)]) {
        throw OutOfRange("slice index " + std::to_string(index) + " out of range for axis " +
                         std::to_string(axis));
    }
    LabelSlice s;
    s.dims = slice_dims(v.dims(), axis);
    s.axis = axis;
    s.index = index;
    s.values = gather_plane(v.voxels(), v.dims(), axis, index);
    return s;
}

CtVolume stack_slices(std::span<const Slice2D> slices, int axis, const Spacing3& spacing) {
    Extent3 dims{};
    auto voxels = scatter_planes<Slice2D, float>(slices, axis, dims);
    return CtVolume(dims, spacing, std::move(voxels));
}

LabelVolume stack_label_slices(std::span<const LabelSlice> slices, int axis,
                               std::map<std::uint8_t, std::string> label_names) {
    Extent3 dims{};
    auto voxels = scatter_planes<LabelSlice, std::uint8_t>(slices, axis, dims);
    return LabelVolume(dims, std::move(voxels), std::move(label_names));
}

} // namespace ctwindow
