#pragma once

#include "ctwindow/metrics.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ctwindow {

/// Samples with at most this many nonzero differences get an exact p value.
inline constexpr std::size_t kWilcoxonExactMaxN = 20;

enum class WilcoxonMethod { Exact, NormalApprox };

const char* wilcoxon_method_name(WilcoxonMethod m);

struct WilcoxonResult {
    std::size_t n_effective = 0;
    double statistic = 0.0;  // sum of ranks of positive differences a - b
    double p_two_sided = 1.0;
    WilcoxonMethod method = WilcoxonMethod::Exact;
};

/**
 * Paired Wilcoxon signed-rank test of a against b.
 *
 * Zero differences are dropped and tied |d| receive mid-ranks. With
 * n_effective <= kWilcoxonExactMaxN the two-sided p value is the fraction of
 * the 2^n sign assignments whose rank sum lies at least as far from n(n+1)/4 as
 * the observed one. Larger samples use the normal approximation with
 * continuity and tie-variance corrections.
 *
 * Throws InvalidArgument for empty or unequal inputs and DegenerateSample
 * when every difference is zero.
 */
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Benjamini-Hochberg step-up adjustment with an explicit comparison count m
/// (m may exceed p_values.size()). Results are returned in input order.
std::vector<double> fdr_bh(std::span<const double> p_values, std::size_t m);

struct ComparisonOptions {
    double alpha = 0.05;
    std::size_t m = 12;
};

inline constexpr const char* kSymbolNotSignificant = "—";  // em dash
inline constexpr const char* kSymbolHigher = "↑";
inline constexpr const char* kSymbolLower = "↓";
inline constexpr const char* kSymbolReference = "Ref.";

struct ComparisonRow {
    std::string organ;
    int label_id = 0;
    std::string method;
    std::string reference;
    SummaryStats summary;
    bool is_reference = false;
    bool tested = false;  // false for the reference row and all-zero-difference pairs
    WilcoxonMethod wilcoxon_method = WilcoxonMethod::Exact;
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_fdr = 1.0;
    std::string symbol;
    bool fdr_significant = false;
    bool best_median = false;  // highest median within the organ
    bool best_mean = false;    // highest mean within the organ
};

using MethodTable = std::pair<std::string, std::vector<DiceRecord>>;

/**
 * Per-organ comparison of every method against `reference`.
 *
 * Rows are ordered by label id, then the reference row, then the remaining
 * methods in input order. Raw p values of an organ are FDR-adjusted together
 * with count options.m. Throws InvalidArgument when a table's
 * (subject, label) pairs differ from the reference's or the reference is absent.
 */
std::vector<ComparisonRow> compare_methods(std::span<const MethodTable> tables, const std::string& reference,
                                           const ComparisonOptions& options = {});

/// Header: organ,method,reference,n,median,mean,std,W,p_raw,p_fdr,symbol,fdr_significant,best
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

/// JSON sidecar recording alpha, m, the FDR method and the Wilcoxon mode per row.
std::string comparison_metadata_json(const ComparisonOptions& options, std::span<const ComparisonRow> rows);

} // namespace ctwindow
