#pragma once

// Run configuration for reproduction runs, loaded from JSON.
//
//   {
//     "seed": 1234,
//     "strategies": [{"strategy": "STN"}, {"strategy": "SWN", "x": 50, "y": 50}],
//     "phantom": { "dims": [64, 64, 16], "spacing": [1, 1, 2.5], "background_hu": -1000,
//                  "background_noise_std": 15, "dtype": "int16",
//                  "organs": [{"label_id": 1, "label_name": "liver", "center": [32, 32, 8],
//                              "radii": [10, 10, 5], "mean_hu": 60, "noise_std": 15}] },
//     "train_subjects": 5, "test_subjects": 5, "jitter": 2, "epochs": 10,
//     "band": {"lower_percentile": 1, "upper_percentile": 99, "epsilon": 0.5, "axis": 2},
//     "shifts": {"from": -300, "to": 300, "step": 25},
//     "augment": {"max_rotation_deg": 10, "max_translation": [20, 20], "crop_size": [64, 64], "pad": 0},
//     "alpha": 0.05, "m": 12, "threads": 0,
//     "output": "sweep.csv"
//   }
//
// Every key is optional. A single strategy may be given inline instead of the
// list: {"strategy": "SWN", "x": 50, "y": 50, "seed": 1234}. "shifts" also
// accepts an explicit array. Unknown keys anywhere are rejected.

#include "ctwindow/augment.hpp"
#include "ctwindow/phantom.hpp"
#include "ctwindow/segmenter.hpp"
#include "ctwindow/window.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctwindow {

struct StrategySpec {
    Strategy strategy = Strategy::Stn;
    double x = 0.0;  // sigma of the level (SWN only)
    double y = 0.0;  // sigma of the width (SWN only)
    std::optional<std::uint64_t> seed;

    /// "STN", "WIR" or "SWN[x,y]".
    [[nodiscard]] std::string label() const;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::vector<StrategySpec> strategies;
    PhantomConfig phantom;
    std::size_t train_subjects = 5;
    std::size_t test_subjects = 5;
    double jitter = 2.0;
    BandFitOptions band;
    std::vector<double> shifts;
    AugmentConfig augment;
    double alpha = 0.05;
    std::size_t m = 12;
    std::size_t threads = 0;
    std::string output;
};

/// Defaults: STN, WIR and SWN[50,50] on the reference phantom, 5 + 5
/// subjects, shifts -300..300 step 25.
RunConfig default_run_config();

/// Throws FormatError on malformed JSON, wrong types or unknown keys and
/// InvalidArgument on values that fail validation.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Seeds used by a run:
///   training subject i  derive_seed(seed, "train/<i>")
///   test subject i      derive_seed(seed, "test/<i>")
///   SWN sampler         spec.seed, else derive_seed(seed, "swn/<label>")
std::uint64_t subject_seed(std::uint64_t run_seed, const std::string& split, std::size_t index);
std::uint64_t strategy_seed(std::uint64_t run_seed, const StrategySpec& spec);

} // namespace ctwindow
