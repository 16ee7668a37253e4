#include "ctwindow/stats.hpp"

#include "ctwindow/csv.hpp"
#include "ctwindow/error.hpp"
#include "ctwindow/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace ctwindow {

namespace {

struct RankedDifferences {
    std::vector<double> abs_diff;
    std::vector<bool> positive;
    std::vector<double> ranks;
    std::vector<std::size_t> tie_sizes;
};

RankedDifferences rank_differences(std::span<const double> a, std::span<const double> b) {
    RankedDifferences r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (std::isnan(d)) {
            throw InvalidArgument("wilcoxon_signed_rank: NaN in input");
        }
        if (d != 0.0) {
            r.abs_diff.push_back(std::abs(d));
            r.positive.push_back(d > 0.0);
        }
    }
    const std::size_t n = r.abs_diff.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return r.abs_diff[i] < r.abs_diff[j]; });
    r.ranks.assign(n, 0.0);
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && r.abs_diff[order[end]] == r.abs_diff[order[start]]) {
            ++end;
        }
        // Positions start..end-1 share the mid-rank of ranks start+1..end.
        const double mid = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) {
            r.ranks[order[k]] = mid;
        }
        r.tie_sizes.push_back(end - start);
        start = end;
    }
    return r;
}

// Exact two-sided p value. Ranks are doubled so mid-ranks become integers and
// the sign-assignment distribution is tabulated by subset-sum counting.
double exact_p_value(const std::vector<double>& ranks, double statistic) {
    const std::size_t n = ranks.size();
    std::vector<std::uint64_t> doubled(n);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = static_cast<std::uint64_t>(std::llround(2.0 * ranks[i]));
        total += doubled[i];
    }
    std::vector<std::uint64_t> count(total + 1, 0);
    count[0] = 1;
    std::uint64_t reach = 0;
    for (std::uint64_t r : doubled) {
        reach += r;
        for (std::uint64_t s = reach; s >= r; --s) {
            count[s] += count[s - r];
            if (s == r) {
                break;
            }
        }
    }
    // Compare |2s - total| against |2w - total| in doubled units (all integers).
    const auto observed2 = static_cast<std::int64_t>(std::llround(2.0 * statistic));
    const std::int64_t t = static_cast<std::int64_t>(total);
    const std::int64_t observed_dev = std::llabs(2 * observed2 - t);
    std::uint64_t extreme = 0;
    for (std::uint64_t s = 0; s <= total; ++s) {
        if (std::llabs(2 * static_cast<std::int64_t>(s) - t) >= observed_dev) {
            extreme += count[s];
        }
    }
    const double p = static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
    return std::min(1.0, p);
}

double normal_p_value(const RankedDifferences& r, double statistic) {
    const auto n = static_cast<double>(r.ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double tie_term = 0.0;
    for (std::size_t t : r.tie_sizes) {
        const auto tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(statistic - mean) - 0.5) / std::sqrt(variance);
    const double p = std::erfc(z / std::sqrt(2.0));
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

std::string best_marker(const ComparisonRow& row) {
    if (row.best_median && row.best_mean) {
        return "median;mean";
    }
    if (row.best_median) {
        return "median";
    }
    if (row.best_mean) {
        return "mean";
    }
    return "";
}

} // namespace

const char* wilcoxon_method_name(WilcoxonMethod m) {
    return m == WilcoxonMethod::Exact ? "exact" : "normal_approx";
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("wilcoxon_signed_rank: samples have different lengths");
    }
    if (a.empty()) {
        throw InvalidArgument("wilcoxon_signed_rank: empty samples");
    }
    const RankedDifferences r = rank_differences(a, b);
    if (r.ranks.empty()) {
        throw DegenerateSample("wilcoxon_signed_rank: all paired differences are zero");
    }
    WilcoxonResult res;
    res.n_effective = r.ranks.size();
    for (std::size_t i = 0; i < r.ranks.size(); ++i) {
        if (r.positive[i]) {
            res.statistic += r.ranks[i];
        }
    }
    if (res.n_effective <= kWilcoxonExactMaxN) {
        res.method = WilcoxonMethod::Exact;
        res.p_two_sided = exact_p_value(r.ranks, res.statistic);
    } else {
        res.method = WilcoxonMethod::NormalApprox;
        res.p_two_sided = normal_p_value(r, res.statistic);
    }
    return res;
}

std::vector<double> fdr_bh(std::span<const double> p_values, std::size_t m) {
    const std::size_t k = p_values.size();
    if (m < k) {
        throw InvalidArgument("fdr_bh: comparison count m=" + std::to_string(m) + " is smaller than the " +
                              std::to_string(k) + " p values supplied");
    }
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw InvalidArgument("fdr_bh: p values must lie in (0, 1]");
        }
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

    std::vector<double> adjusted(k);
    double running = 1.0;
    for (std::size_t pos = k; pos-- > 0;) {
        const std::size_t i = order[pos];
        const double q = p_values[i] * static_cast<double>(m) / static_cast<double>(pos + 1);
        running = std::min(running, q);
        adjusted[i] = std::min(1.0, running);
    }
    return adjusted;
}

std::vector<ComparisonRow> compare_methods(std::span<const MethodTable> tables, const std::string& reference,
                                           const ComparisonOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw InvalidArgument("compare_methods: alpha must lie in (0, 1)");
    }
    const MethodTable* ref_table = nullptr;
    std::set<std::string> names;
    for (const auto& t : tables) {
        if (!names.insert(t.first).second) {
            throw InvalidArgument("compare_methods: duplicate method '" + t.first + "'");
        }
        if (t.first == reference) {
            ref_table = &t;
        }
    }
    if (ref_table == nullptr) {
        throw InvalidArgument("compare_methods: reference method '" + reference + "' not among the tables");
    }

    // label id -> subject id -> dice, per method.
    using Scores = std::map<int, std::map<std::string, double>>;
    auto index_table = [](const MethodTable& t) {
        Scores s;
        for (const auto& rec : t.second) {
            if (!s[rec.label_id].emplace(rec.subject_id, rec.dice).second) {
                throw InvalidArgument("compare_methods: method '" + t.first + "' has duplicate record for subject '" +
                                      rec.subject_id + "', label " + std::to_string(rec.label_id));
            }
        }
        return s;
    };
    std::map<int, std::string> organ_names;
    for (const auto& rec : ref_table->second) {
        organ_names.try_emplace(rec.label_id, rec.label_name);
    }

    // Reference first, then the others in input order.
    std::vector<const MethodTable*> ordered{ref_table};
    for (const auto& t : tables) {
        if (&t != ref_table) {
            ordered.push_back(&t);
        }
    }
    std::vector<Scores> scores;
    scores.reserve(ordered.size());
    for (const auto* t : ordered) {
        scores.push_back(index_table(*t));
    }
    const Scores& ref_scores = scores.front();
    for (std::size_t k = 1; k < ordered.size(); ++k) {
        bool same = scores[k].size() == ref_scores.size();
        for (auto it = scores[k].cbegin(), rt = ref_scores.cbegin(); same && it != scores[k].cend(); ++it, ++rt) {
            same = it->first == rt->first && it->second.size() == rt->second.size() &&
                   std::equal(it->second.begin(), it->second.end(), rt->second.begin(),
                              [](const auto& x, const auto& y) { return x.first == y.first; });
        }
        if (!same) {
            throw InvalidArgument("compare_methods: subject/label set of method '" + ordered[k]->first +
                                  "' differs from reference '" + reference + "'");
        }
    }

    std::vector<ComparisonRow> rows;
    for (const auto& [label, ref_by_subject] : ref_scores) {
        const std::size_t first = rows.size();
        std::vector<double> ref_values;
        for (const auto& [_, v] : ref_by_subject) {
            ref_values.push_back(v);
        }
        for (std::size_t k = 0; k < ordered.size(); ++k) {
            ComparisonRow row;
            row.organ = organ_names[label];
            row.label_id = label;
            row.method = ordered[k]->first;
            row.reference = reference;
            std::vector<double> values;
            for (const auto& [_, v] : scores[k].at(label)) {
                values.push_back(v);
            }
            row.summary = summarize(values);
            if (k == 0) {
                row.is_reference = true;
                row.symbol = kSymbolReference;
            } else {
                try {
                    const WilcoxonResult w = wilcoxon_signed_rank(values, ref_values);
                    row.tested = true;
                    row.statistic = w.statistic;
                    row.p_raw = w.p_two_sided;
                    row.wilcoxon_method = w.method;
                } catch (const DegenerateSample&) {
                    row.tested = false;
                }
            }
            rows.push_back(std::move(row));
        }

        std::vector<double> raw;
        for (std::size_t i = first; i < rows.size(); ++i) {
            if (rows[i].tested) {
                raw.push_back(rows[i].p_raw);
            }
        }
        const std::vector<double> adjusted = fdr_bh(raw, options.m);
        const ComparisonRow& ref_row = rows[first];
        double best_median = -std::numeric_limits<double>::infinity();
        double best_mean = best_median;
        for (std::size_t i = first; i < rows.size(); ++i) {
            best_median = std::max(best_median, rows[i].summary.median);
            best_mean = std::max(best_mean, rows[i].summary.mean);
        }
        std::size_t next = 0;
        for (std::size_t i = first; i < rows.size(); ++i) {
            ComparisonRow& row = rows[i];
            row.best_median = row.summary.median == best_median;
            row.best_mean = row.summary.mean == best_mean;
            if (row.is_reference) {
                continue;
            }
            if (!row.tested) {
                row.symbol = kSymbolNotSignificant;
                continue;
            }
            row.p_fdr = adjusted[next++];
            row.fdr_significant = row.p_fdr < options.alpha;
            if (row.p_raw >= options.alpha) {
                row.symbol = kSymbolNotSignificant;
                continue;
            }
            double delta = row.summary.median - ref_row.summary.median;
            if (delta == 0.0) {
                delta = row.summary.mean - ref_row.summary.mean;
            }
            if (delta > 0.0) {
                row.symbol = kSymbolHigher;
            } else if (delta < 0.0) {
                row.symbol = kSymbolLower;
            } else {
                row.symbol = kSymbolNotSignificant;
                warn("organ '" + row.organ + "', method '" + row.method +
                     "': significant difference but equal median and mean; no direction reported");
            }
        }
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
    csv::write_row(out, {"organ", "method", "reference", "n", "median", "mean", "std", "W", "p_raw", "p_fdr", "symbol",
                         "fdr_significant", "best"});
    for (const auto& r : rows) {
        const bool has_test = r.tested;
        csv::write_row(out, {r.organ, r.method, r.reference, std::to_string(r.summary.n),
                             csv::format_number(r.summary.median), csv::format_number(r.summary.mean),
                             csv::format_number(r.summary.std), has_test ? csv::format_number(r.statistic) : "NA",
                             has_test ? csv::format_number(r.p_raw) : "NA",
                             has_test ? csv::format_number(r.p_fdr) : "NA", r.symbol, r.fdr_significant ? "*" : "",
                             best_marker(r)});
    }
}

std::string comparison_metadata_json(const ComparisonOptions& options, std::span<const ComparisonRow> rows) {
    nlohmann::ordered_json j;
    j["alpha"] = options.alpha;
    j["m"] = options.m;
    j["fdr_method"] = "benjamini-hochberg";
    j["fdr_scope"] = "per organ";
    j["wilcoxon_exact_max_n"] = kWilcoxonExactMaxN;
    j["wilcoxon_zero_differences"] = "dropped";
    j["direction"] = "median difference, mean difference on ties";
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        if (r.is_reference) {
            continue;
        }
        nlohmann::ordered_json e;
        e["organ"] = r.organ;
        e["method"] = r.method;
        e["wilcoxon_mode"] = r.tested ? wilcoxon_method_name(r.wilcoxon_method) : "not_tested";
        list.push_back(e);
    }
    j["comparisons"] = list;
    return j.dump(2) + "\n";
}

} // namespace ctwindow
