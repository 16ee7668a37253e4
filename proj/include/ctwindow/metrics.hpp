#pragma once

#include "ctwindow/volume.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ctwindow {

struct DiceRecord {
    std::string subject_id;
    int label_id = 0;
    std::string label_name;
    double dice = 0.0;

    friend bool operator==(const DiceRecord&, const DiceRecord&) = default;
};

struct SummaryStats {
    double median = 0.0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1); 0 when n == 1
    std::size_t n = 0;
};

/// Dice of two binary masks (nonzero = inside). Both empty -> 1.0.
double dice(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Dice of the indicator masks (pred == id) and (truth == id) for each id.
/// Ids missing from truth's label map still produce a record and a warning.
std::vector<DiceRecord> multi_label_dice(const LabelVolume& pred, const LabelVolume& truth,
                                         std::span<const int> labels, const std::string& subject_id = "");

/// Throws InvalidArgument on an empty list.
SummaryStats summarize(std::span<const double> scores);

/// CSV with header subject_id,label_id,label_name,dice.
void write_dice_csv(std::ostream& out, std::span<const DiceRecord> records);
std::vector<DiceRecord> read_dice_csv(std::istream& in);

} // namespace ctwindow
