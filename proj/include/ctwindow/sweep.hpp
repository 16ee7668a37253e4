#pragma once

#include "ctwindow/segmenter.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ctwindow {

struct SweepRow {
    double shift_hu = 0.0;
    std::string strategy;
    int label_id = 0;
    std::string label_name;
    double mean_dice = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    /// Mean dice for (strategy, label) at a shift; throws OutOfRange when absent.
    [[nodiscard]] double dice_at(const std::string& strategy, int label_id, double shift_hu) const;
    /// Number of shifts where mean dice >= threshold.
    [[nodiscard]] std::size_t tolerance_width(const std::string& strategy, int label_id,
                                              double threshold = 0.5) const;
};

/// Inclusive arithmetic grid from, from + step, ..., to. Throws on step <= 0
/// or to < from.
std::vector<double> shift_grid(double from, double to, double step);

/// The -300..+300 HU grid in 25 HU steps (25 shifts).
std::vector<double> default_shift_grid();

/**
 * Robustness sweep: every test image is shifted by each s, normalized for
 * testing under `strategy`, segmented slice-wise and scored against its
 * ground truth for every non-background label. One row per (shift, label)
 * holding the dice averaged over subjects.
 *
 * Cells (shift x subject) run on up to `workers` threads and are reduced in a
 * fixed order, so the output does not depend on scheduling.
 */
SweepResult run_shift_sweep(const Segmenter& seg, std::span<const Subject> test, Strategy strategy,
                            std::span<const double> shifts, const std::string& strategy_label = "",
                            std::size_t workers = 0);

/// Header: shift_hu,strategy,label_id,label_name,mean_dice
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

} // namespace ctwindow
