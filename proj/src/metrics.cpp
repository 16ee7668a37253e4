#include "ctwindow/metrics.hpp"

#include "ctwindow/csv.hpp"
#include "ctwindow/error.hpp"
#include "ctwindow/log.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace ctwindow {

double dice(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dice: masks have different sizes");
    }
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool in_a = a[i] != 0;
        const bool in_b = b[i] != 0;
        na += in_a;
        nb += in_b;
        both += in_a && in_b;
    }
    if (na + nb == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::vector<DiceRecord> multi_label_dice(const LabelVolume& pred, const LabelVolume& truth,
                                         std::span<const int> labels, const std::string& subject_id) {
    if (pred.dims() != truth.dims()) {
        throw InvalidArgument("multi_label_dice: prediction and truth dims differ");
    }
    // One pass builds a joint histogram; per-label counts follow from it.
    std::array<std::size_t, 256> n_pred{}, n_truth{}, n_both{};
    const auto p = pred.voxels();
    const auto t = truth.voxels();
    for (std::size_t i = 0; i < p.size(); ++i) {
        ++n_pred[p[i]];
        ++n_truth[t[i]];
        n_both[p[i]] += p[i] == t[i];
    }

    std::vector<DiceRecord> out;
    out.reserve(labels.size());
    for (int id : labels) {
        if (id < 0 || id > 255) {
            throw InvalidArgument("label id " + std::to_string(id) + " outside 0..255");
        }
        const auto uid = static_cast<std::uint8_t>(id);
        DiceRecord rec;
        rec.subject_id = subject_id;
        rec.label_id = id;
        if (auto it = truth.label_names().find(uid); it != truth.label_names().end()) {
            rec.label_name = it->second;
        } else if (auto pit = pred.label_names().find(uid); pit != pred.label_names().end()) {
            rec.label_name = pit->second;
            warn("label " + std::to_string(id) + " is not named in the ground-truth label map");
        } else {
            rec.label_name = "label_" + std::to_string(id);
            warn("label " + std::to_string(id) + " is not named in either label map");
        }
        const std::size_t denom = n_pred[uid] + n_truth[uid];
        rec.dice = denom == 0 ? 1.0 : 2.0 * static_cast<double>(n_both[uid]) / static_cast<double>(denom);
        out.push_back(std::move(rec));
    }
    return out;
}

SummaryStats summarize(std::span<const double> scores) {
    if (scores.empty()) {
        throw InvalidArgument("summarize: empty score list");
    }
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    SummaryStats s;
    s.n = n;
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    // Sum in sorted order so the result does not depend on input order.
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : sorted) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

void write_dice_csv(std::ostream& out, std::span<const DiceRecord> records) {
    csv::write_row(out, {"subject_id", "label_id", "label_name", "dice"});
    for (const auto& r : records) {
        csv::write_row(out, {r.subject_id, std::to_string(r.label_id), r.label_name, csv::format_number(r.dice)});
    }
}

std::vector<DiceRecord> read_dice_csv(std::istream& in) {
    const auto rows = csv::read_all(in);
    if (rows.empty()) {
        throw FormatError("dice CSV is empty (header row is mandatory)");
    }
    const auto& header = rows.front();
    const std::size_t c_subject = csv::column(header, "subject_id");
    const std::size_t c_label = csv::column(header, "label_id");
    const std::size_t c_name = csv::column(header, "label_name");
    const std::size_t c_dice = csv::column(header, "dice");

    std::vector<DiceRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw FormatError("dice CSV row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                              " fields, expected " + std::to_string(header.size()));
        }
        DiceRecord rec;
        rec.subject_id = row[c_subject];
        rec.label_id = static_cast<int>(csv::parse_integer(row[c_label], "label_id"));
        rec.label_name = row[c_name];
        rec.dice = csv::parse_number(row[c_dice], "dice");
        if (!(rec.dice >= 0.0 && rec.dice <= 1.0)) {
            throw FormatError("dice value outside [0, 1] on row " + std::to_string(r + 1));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace ctwindow
