#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace efftune {

/// Which end of a metric is good. MRE: lower; SA: higher.
enum class Orientation { lower_is_better, higher_is_better };

/// Vargha-Delaney A12: P(x > y) + 0.5 P(x == y) over all pairs.
double a12(std::span<const double> xs, std::span<const double> ys);

/// Two-sided pooled-shift bootstrap test on the difference of means.
///
/// Both samples are shifted onto the pooled mean (the null), resampled with
/// replacement, and the observed |mean difference| is compared with the
/// resampled ones. True when the fraction of resamples at least as extreme
/// falls below 1 - confidence.
bool bootstrap_significant(std::span<const double> xs, std::span<const double> ys, std::size_t resamples,
                           double confidence, std::uint64_t seed);

struct TreatmentSamples {
    std::string token;
    std::vector<double> scores;
    double runtime_seconds = 0.0;
};

struct RankEntry {
    int rank = 1;
    std::string token;
    double median = 0.0;
    double iqr = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double runtime_seconds = 0.0;
    bool fast = false;

    bool operator==(const RankEntry&) const = default;
};

struct RankTable {
    Orientation orientation = Orientation::lower_is_better;
    std::vector<RankEntry> entries;

    bool operator==(const RankTable&) const = default;
};

struct ScottKnottOptions {
    Orientation orientation = Orientation::lower_is_better;
    std::size_t resamples = 1000;
    double confidence = 0.95;
    /// Splits need max(A12, 1 - A12) at or above this.
    double small_effect = 0.6;
    /// Rank-1 treatments within this factor of the fastest rank-1 runtime are flagged fast.
    double fast_factor = 10.0;
};

/// Expected squared shift of the means when [0, cut) and [cut, n) are separated.
double expected_delta(const std::vector<std::vector<double>>& groups, std::size_t cut);

/// Cut in [1, n) maximizing expected_delta; the first one on ties.
std::size_t best_cut(const std::vector<std::vector<double>>& groups);

/// Top-down bi-clustering of median-sorted treatments into ranks.
RankTable scott_knott(std::vector<TreatmentSamples> groups, const ScottKnottOptions& options, std::uint64_t seed);

/// Aligned text with a quartile glyph per row; `scale` bounds the glyph axis.
std::string render_rank_table(const RankTable& table, const std::string& title, double lo = 0.0,
                              double hi = 100.0);
/// Quartile glyph: '-' spans q25..q75, '*' marks the median, '|' the axis midpoint.
std::string quartile_glyph(double q25, double median, double q75, double lo, double hi, std::size_t width = 30);

std::string rank_table_csv(const RankTable& table);
RankTable parse_rank_table_csv(const std::string& text);

}  // namespace efftune
