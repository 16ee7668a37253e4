#pragma once

// CTV volume format.
//
// A volume is a JSON header `<name>.ctv.json` plus a sibling raw voxel file:
//
//   {
//     "dims": [nx, ny, nz],
//     "spacing_mm": [sx, sy, sz],
//     "dtype": "int16" | "float32" | "uint8",
//     "raw": "<name>.raw",
//     "units": "HU" | "label",
//     "labels": {"0": "background", "1": "liver"}   // label volumes only, optional
//   }
//
// Raw voxels are x-fastest, little-endian, without padding. Image volumes use
// units "HU" with dtype int16 or float32; label volumes use units "label" with
// dtype uint8.

#include "ctwindow/volume.hpp"

#include <filesystem>

namespace ctwindow {

/// Raw file path that pairs with a header path (`a/b.ctv.json` -> `a/b.raw`).
std::filesystem::path raw_path_for(const std::filesystem::path& header);

CtVolume load_volume(const std::filesystem::path& header);
void save_volume(const CtVolume& volume, const std::filesystem::path& header);

LabelVolume load_labels(const std::filesystem::path& header);
void save_labels(const LabelVolume& labels, const std::filesystem::path& header,
                 const Spacing3& spacing = {1.0, 1.0, 1.0});

} // namespace ctwindow
