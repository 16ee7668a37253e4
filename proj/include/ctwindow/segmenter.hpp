#pragma once

#include "ctwindow/phantom.hpp"
#include "ctwindow/window.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctwindow {

/// Slice-wise segmentation model operating on normalized intensities.
class Segmenter {
public:
    virtual ~Segmenter() = default;

    /// Deterministic label prediction for one normalized slice.
    [[nodiscard]] virtual LabelSlice predict(const Slice2D& normalized) const = 0;
    /// Normalization strategy the model was fitted under.
    [[nodiscard]] virtual Strategy strategy() const = 0;
    [[nodiscard]] virtual const std::map<std::uint8_t, std::string>& label_names() const = 0;
};

/// Closed intensity interval [lo, hi] in normalized units assigned to a label.
struct Band {
    std::uint8_t label_id = 0;
    float lo = 0.0f;
    float hi = 0.0f;

    friend bool operator==(const Band&, const Band&) = default;
};

/// Assigns each voxel the lowest label id whose band contains its value;
/// voxels outside every band become background (0).
class BandSegmenter final : public Segmenter {
public:
    /// Throws InvalidArgument if a band has lo >= hi or a label repeats.
    BandSegmenter(std::vector<Band> bands, Strategy strategy, std::map<std::uint8_t, std::string> label_names);

    [[nodiscard]] LabelSlice predict(const Slice2D& normalized) const override;
    [[nodiscard]] Strategy strategy() const override { return strategy_; }
    [[nodiscard]] const std::map<std::uint8_t, std::string>& label_names() const override { return names_; }

    /// Sorted by label id.
    [[nodiscard]] const std::vector<Band>& bands() const noexcept { return bands_; }
    [[nodiscard]] const Band* band_for(std::uint8_t label_id) const noexcept;

private:
    std::vector<Band> bands_;
    Strategy strategy_;
    std::map<std::uint8_t, std::string> names_;
};

struct BandFitOptions {
    double lower_percentile = 1.0;
    double upper_percentile = 99.0;
    double epsilon = 0.5;  // bands narrower than 2*epsilon are widened to mid +- epsilon
    std::size_t epochs = 10;
    int axis = 2;
};

/// Linear-interpolated percentile (0..100) of `values`; reorders the input.
double percentile_inplace(std::vector<float>& values, double pct);

/**
 * Fit one band per label, background included.
 *
 * Every epoch normalizes every training slice once with
 * normalize_for_training (so SWN draws a new window per slice per epoch) and
 * pools each label's normalized values. A label's band is the
 * [lower, upper] percentile range of its pool. `swn` must be given iff the
 * strategy is SWN. Throws InvalidArgument for an empty training set, a
 * missing/extra SWN parameter set, or a named label with no voxels.
 */
BandSegmenter fit_band_segmenter(std::span<const Subject> training, Strategy strategy,
                                 const std::optional<SwnParams>& swn, const BandFitOptions& options = {});

/// Normalize every slice of `image` for testing under `strategy` and predict.
LabelVolume segment_volume(const Segmenter& seg, const CtVolume& image, Strategy strategy, int axis = 2);

} // namespace ctwindow
