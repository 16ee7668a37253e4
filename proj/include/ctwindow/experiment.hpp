#pragma once

#include "ctwindow/run_config.hpp"
#include "ctwindow/sweep.hpp"

#include <string>
#include <vector>

namespace ctwindow {

/// `count` phantoms built from `base`, each jittered and seeded with
/// subject_seed(run_seed, split, i). Ids are "<split>-<i>".
std::vector<Subject> make_subjects(const PhantomConfig& base, std::uint64_t run_seed, const std::string& split,
                                   std::size_t count, double jitter);

/// Fitted segmenter for one strategy of a run.
BandSegmenter fit_for_strategy(const RunConfig& cfg, const StrategySpec& spec, std::span<const Subject> training);

/// Full robustness run: build the training and test phantoms, fit one band
/// segmenter per strategy and sweep it over cfg.shifts. Rows are grouped by
/// strategy in config order. `workers` 0 uses cfg.threads, then worker_count().
SweepResult run_experiment(const RunConfig& cfg, std::size_t workers = 0);

} // namespace ctwindow
