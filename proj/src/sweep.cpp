#include "ctwindow/sweep.hpp"

#include "ctwindow/csv.hpp"
#include "ctwindow/error.hpp"
#include "ctwindow/metrics.hpp"
#include "ctwindow/parallel.hpp"

#include <cmath>
#include <ostream>
#include <set>

namespace ctwindow {

double SweepResult::dice_at(const std::string& strategy, int label_id, double shift_hu) const {
    for (const auto& r : rows) {
        if (r.strategy == strategy && r.label_id == label_id && r.shift_hu == shift_hu) {
            return r.mean_dice;
        }
    }
    throw OutOfRange("no sweep row for " + strategy + ", label " + std::to_string(label_id) + ", shift " +
                     csv::format_number(shift_hu));
}

std::size_t SweepResult::tolerance_width(const std::string& strategy, int label_id, double threshold) const {
    std::size_t width = 0;
    for (const auto& r : rows) {
        if (r.strategy == strategy && r.label_id == label_id && r.mean_dice >= threshold) {
            ++width;
        }
    }
    return width;
}

std::vector<double> shift_grid(double from, double to, double step) {
    if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from) {
        throw InvalidArgument("shift grid needs finite from <= to and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = from + static_cast<double>(i) * step;
    }
    return grid;
}

std::vector<double> default_shift_grid() { return shift_grid(-300.0, 300.0, 25.0); }

SweepResult run_shift_sweep(const Segmenter& seg, std::span<const Subject> test, Strategy strategy,
                            std::span<const double> shifts, const std::string& strategy_label, std::size_t workers) {
    if (shifts.empty()) {
        throw InvalidArgument("run_shift_sweep: empty shift grid");
    }
    if (test.empty()) {
        throw InvalidArgument("run_shift_sweep: empty test set");
    }
    std::map<int, std::string> labels;
    for (const auto& s : test) {
        for (const auto& [id, name] : s.data.labels.label_names()) {
            if (id != 0) {
                labels.try_emplace(id, name);
            }
        }
    }
    std::vector<int> label_ids;
    for (const auto& [id, _] : labels) {
        label_ids.push_back(id);
    }

    const std::size_t n_subjects = test.size();
    std::vector<std::vector<DiceRecord>> cells(shifts.size() * n_subjects);
    parallel_for(
        cells.size(),
        [&](std::size_t c) {
            const std::size_t si = c / n_subjects;
            const Subject& subject = test[c % n_subjects];
            const CtVolume shifted = shift_intensity(subject.data.image, shifts[si]);
            const LabelVolume pred = segment_volume(seg, shifted, strategy);
            cells[c] = multi_label_dice(pred, subject.data.labels, label_ids, subject.id);
        },
        workers == 0 ? worker_count() : workers);

    const std::string name = strategy_label.empty() ? strategy_name(strategy) : strategy_label;
    SweepResult result;
    for (std::size_t si = 0; si < shifts.size(); ++si) {
        for (std::size_t li = 0; li < label_ids.size(); ++li) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n_subjects; ++j) {
                sum += cells[si * n_subjects + j][li].dice;
            }
            result.rows.push_back(SweepRow{shifts[si], name, label_ids[li], labels[label_ids[li]],
                                           sum / static_cast<double>(n_subjects)});
        }
    }
    return result;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    csv::write_row(out, {"shift_hu", "strategy", "label_id", "label_name", "mean_dice"});
    for (const auto& r : rows) {
        csv::write_row(out, {csv::format_number(r.shift_hu), r.strategy, std::to_string(r.label_id), r.label_name,
                             csv::format_number(r.mean_dice)});
    }
}

} // namespace ctwindow
