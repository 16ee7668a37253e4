#include "ctwindow/segmenter.hpp"

#include "ctwindow/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctwindow {

BandSegmenter::BandSegmenter(std::vector<Band> bands, Strategy strategy,
                             std::map<std::uint8_t, std::string> label_names)
    : bands_(std::move(bands)), strategy_(strategy), names_(std::move(label_names)) {
    std::sort(bands_.begin(), bands_.end(), [](const Band& a, const Band& b) { return a.label_id < b.label_id; });
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        if (!(bands_[i].lo < bands_[i].hi)) {
            throw InvalidArgument("band for label " + std::to_string(bands_[i].label_id) + " is empty (lo >= hi)");
        }
        if (i > 0 && bands_[i].label_id == bands_[i - 1].label_id) {
            throw InvalidArgument("duplicate band for label " + std::to_string(bands_[i].label_id));
        }
    }
    names_.try_emplace(0, "background");
}

const Band* BandSegmenter::band_for(std::uint8_t label_id) const noexcept {
    for (const auto& b : bands_) {
        if (b.label_id == label_id) {
            return &b;
        }
    }
    return nullptr;
}

LabelSlice BandSegmenter::predict(const Slice2D& normalized) const {
    LabelSlice out;
    out.dims = normalized.dims;
    out.axis = normalized.axis;
    out.index = normalized.index;
    out.values.assign(normalized.values.size(), 0);
    for (std::size_t i = 0; i < normalized.values.size(); ++i) {
        const float v = normalized.values[i];
        for (const Band& b : bands_) {
            if (v >= b.lo && v <= b.hi) {
                out.values[i] = b.label_id;
                break;
            }
        }
    }
    return out;
}

double percentile_inplace(std::vector<float>& values, double pct) {
    if (values.empty()) {
        throw InvalidArgument("percentile of an empty sample");
    }
    if (!(pct >= 0.0 && pct <= 100.0)) {
        throw InvalidArgument("percentile must lie in [0, 100]");
    }
    const double h = (static_cast<double>(values.size()) - 1.0) * pct / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(lo);
    std::nth_element(values.begin(), nth, values.end());
    const double a = *nth;
    if (frac == 0.0 || lo + 1 >= values.size()) {
        return a;
    }
    const double b = *std::min_element(nth + 1, values.end());
    return a + frac * (b - a);
}

BandSegmenter fit_band_segmenter(std::span<const Subject> training, Strategy strategy,
                                 const std::optional<SwnParams>& swn, const BandFitOptions& options) {
    if (training.empty()) {
        throw InvalidArgument("fit_band_segmenter: empty training set");
    }
    if ((strategy == Strategy::Swn) != swn.has_value()) {
        throw InvalidArgument("fit_band_segmenter: SWN parameters are required for SWN and only for SWN");
    }
    if (!(options.lower_percentile < options.upper_percentile) || options.lower_percentile < 0.0 ||
        options.upper_percentile > 100.0) {
        throw InvalidArgument("fit_band_segmenter: need 0 <= lower percentile < upper percentile <= 100");
    }
    if (!(options.epsilon > 0.0)) {
        throw InvalidArgument("fit_band_segmenter: epsilon must be positive");
    }

    std::map<std::uint8_t, std::string> names;
    for (const auto& s : training) {
        if (s.data.image.dims() != s.data.labels.dims()) {
            throw InvalidArgument("fit_band_segmenter: subject '" + s.id + "' image and label dims differ");
        }
        for (const auto& [id, name] : s.data.labels.label_names()) {
            names.try_emplace(id, name);
        }
    }

    std::optional<WindowSampler> sampler;
    if (swn) {
        sampler.emplace(*swn);
    }
    std::map<std::uint8_t, std::vector<float>> pools;
    for (const auto& [id, _] : names) {
        pools[id];
    }

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (const auto& s : training) {
            const std::size_t depth = s.data.image.dims()[static_cast<std::size_t>(options.axis)];
            for (std::size_t k = 0; k < depth; ++k) {
                const Slice2D raw = extract_slice(s.data.image, options.axis, k);
                const LabelSlice lab = extract_label_slice(s.data.labels, options.axis, k);
                const Slice2D norm = normalize_for_training(raw, strategy, sampler ? &*sampler : nullptr);
                for (std::size_t i = 0; i < norm.values.size(); ++i) {
                    pools[lab.values[i]].push_back(norm.values[i]);
                }
            }
        }
    }

    std::vector<Band> bands;
    for (auto& [id, pool] : pools) {
        if (pool.empty()) {
            throw InvalidArgument("fit_band_segmenter: label " + std::to_string(id) + " ('" + names[id] +
                                  "') has no voxels in the training set");
        }
        double lo = percentile_inplace(pool, options.lower_percentile);
        double hi = percentile_inplace(pool, options.upper_percentile);
        if (hi - lo < 2.0 * options.epsilon) {
            const double mid = 0.5 * (lo + hi);
            lo = mid - options.epsilon;
            hi = mid + options.epsilon;
        }
        bands.push_back(Band{id, static_cast<float>(lo), static_cast<float>(hi)});
    }
    return BandSegmenter(std::move(bands), strategy, std::move(names));
}

LabelVolume segment_volume(const Segmenter& seg, const CtVolume& image, Strategy strategy, int axis) {
    const std::size_t depth = image.dims()[static_cast<std::size_t>(axis)];
    std::vector<LabelSlice> slices;
    slices.reserve(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        slices.push_back(seg.predict(normalize_for_testing(extract_slice(image, axis, k), strategy)));
    }
    return stack_label_slices(slices, axis, seg.label_names());
}

} // namespace ctwindow
