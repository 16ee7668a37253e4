#include "ctwindow/ctv_io.hpp"

#include "ctwindow/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <set>

namespace ctwindow {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kHeaderSuffix = ".ctv.json";

template <typename T>
void swap_bytes_if_big_endian(std::vector<T>& values) {
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        for (T& v : values) {
            auto* bytes = reinterpret_cast<unsigned char*>(&v);
            std::reverse(bytes, bytes + sizeof(T));
        }
    }
}

template <typename T>
std::vector<T> read_raw(const fs::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open raw file " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(T)) {
        throw FormatError("raw file " + path.string() + " has " + std::to_string(bytes) +
                          " bytes, header implies " + std::to_string(count * sizeof(T)));
    }
    in.seekg(0, std::ios::beg);
    std::vector<T> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
    if (!in) {
        throw IoError("short read on " + path.string());
    }
    swap_bytes_if_big_endian(values);
    return values;
}

template <typename T>
void write_raw(const fs::path& path, std::span<const T> values) {
    std::vector<T> copy(values.begin(), values.end());
    swap_bytes_if_big_endian(copy);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write raw file " + path.string());
    }
    out.write(reinterpret_cast<const char*>(copy.data()), static_cast<std::streamsize>(copy.size() * sizeof(T)));
    if (!out) {
        throw IoError("write failed on " + path.string());
    }
}

struct Header {
    Extent3 dims{};
    Spacing3 spacing{};
    std::string dtype;
    std::string units;
    fs::path raw;
    std::map<std::uint8_t, std::string> labels;
};

Header read_header(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open header " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("header " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) {
        throw FormatError("header " + path.string() + " must be a JSON object");
    }
    static const std::set<std::string> known{"dims", "spacing_mm", "dtype", "raw", "units", "labels"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) {
            throw FormatError("header " + path.string() + " has unknown key '" + key + "'");
        }
    }
    for (const char* key : {"dims", "spacing_mm", "dtype", "raw", "units"}) {
        if (!j.contains(key)) {
            throw FormatError("header " + path.string() + " is missing '" + key + "'");
        }
    }

    Header h;
    const auto& dims = j["dims"];
    if (!dims.is_array() || dims.size() != 3) {
        throw FormatError("'dims' must be an array of 3 integers");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (!dims[i].is_number_integer() || dims[i].get<long long>() <= 0) {
            throw FormatError("'dims' entries must be positive integers");
        }
        h.dims[i] = dims[i].get<std::size_t>();
    }
    const auto& spacing = j["spacing_mm"];
    if (!spacing.is_array() || spacing.size() != 3) {
        throw FormatError("'spacing_mm' must be an array of 3 numbers");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (!spacing[i].is_number() || !(spacing[i].get<double>() > 0.0)) {
            throw FormatError("'spacing_mm' entries must be positive numbers");
        }
        h.spacing[i] = spacing[i].get<double>();
    }
    if (!j["dtype"].is_string() || !j["units"].is_string() || !j["raw"].is_string()) {
        throw FormatError("'dtype', 'units' and 'raw' must be strings");
    }
    h.dtype = j["dtype"].get<std::string>();
    h.units = j["units"].get<std::string>();
    const fs::path raw = j["raw"].get<std::string>();
    h.raw = raw.is_absolute() ? raw : path.parent_path() / raw;

    if (j.contains("labels")) {
        const auto& labels = j["labels"];
        if (!labels.is_object()) {
            throw FormatError("'labels' must map label ids to names");
        }
        for (const auto& [key, name] : labels.items()) {
            int id = -1;
            try {
                std::size_t used = 0;
                id = std::stoi(key, &used);
                if (used != key.size()) {
                    id = -1;
                }
            } catch (const std::exception&) {
                id = -1;
            }
            if (id < 0 || id > 255 || !name.is_string()) {
                throw FormatError("invalid label entry '" + key + "'");
            }
            h.labels[static_cast<std::uint8_t>(id)] = name.get<std::string>();
        }
    }
    return h;
}

void write_header(const fs::path& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write header " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed on " + path.string());
    }
}

ordered_json base_header(const Extent3& dims, const Spacing3& spacing, const char* dtype,
                         const fs::path& raw, const char* units) {
    ordered_json j;
    j["dims"] = dims;
    j["spacing_mm"] = spacing;
    j["dtype"] = dtype;
    j["raw"] = raw.filename().string();
    j["units"] = units;
    return j;
}

} // namespace

fs::path raw_path_for(const fs::path& header) {
    const std::string name = header.filename().string();
    std::string stem;
    if (name.size() > kHeaderSuffix.size() && name.ends_with(kHeaderSuffix)) {
        stem = name.substr(0, name.size() - kHeaderSuffix.size());
    } else {
        stem = header.stem().string();
    }
    return header.parent_path() / (stem + ".raw");
}

CtVolume load_volume(const fs::path& header) {
    const Header h = read_header(header);
    if (h.units != "HU") {
        throw FormatError("image volume must have units \"HU\", got \"" + h.units + "\"");
    }
    const ElementKind kind = parse_element_kind(h.dtype);
    const std::size_t n = voxel_count(h.dims);
    if (kind == ElementKind::Int16) {
        return CtVolume(h.dims, h.spacing, read_raw<std::int16_t>(h.raw, n));
    }
    return CtVolume(h.dims, h.spacing, read_raw<float>(h.raw, n));
}

void save_volume(const CtVolume& volume, const fs::path& header) {
    const fs::path raw = raw_path_for(header);
    if (volume.kind() == ElementKind::Int16) {
        write_raw(raw, volume.int16_voxels());
    } else {
        write_raw(raw, volume.float_voxels());
    }
    write_header(header, base_header(volume.dims(), volume.spacing(), element_kind_name(volume.kind()), raw, "HU"));
}

LabelVolume load_labels(const fs::path& header) {
    const Header h = read_header(header);
    if (h.units != "label") {
        throw FormatError("label volume must have units \"label\", got \"" + h.units + "\"");
    }
    if (h.dtype != "uint8") {
        throw FormatError("label volume must have dtype \"uint8\", got \"" + h.dtype + "\"");
    }
    auto voxels = read_raw<std::uint8_t>(h.raw, voxel_count(h.dims));
    try {
        return LabelVolume(h.dims, std::move(voxels), h.labels);
    } catch (const InvalidArgument& e) {
        throw FormatError(header.string() + ": " + e.what());
    }
}

void save_labels(const LabelVolume& labels, const fs::path& header, const Spacing3& spacing) {
    const fs::path raw = raw_path_for(header);
    write_raw(raw, labels.voxels());
    ordered_json j = base_header(labels.dims(), spacing, "uint8", raw, "label");
    ordered_json names = ordered_json::object();
    for (const auto& [id, name] : labels.label_names()) {
        names[std::to_string(id)] = name;
    }
    j["labels"] = names;
    write_header(header, j);
}

} // namespace ctwindow
