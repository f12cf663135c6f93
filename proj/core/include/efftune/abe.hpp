#pragma once

#include "efftune/dataset.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace efftune {

enum class SubsetSelection { remove_nothing, outlier_prune };
enum class WeightScheme {
    uniform,
    pearson_correlation,
    spearman_correlation,
    variance_ratio,
    information_gain,
    gain_ratio,
    chi_squared,
    relief
};
enum class Discretization { equal_frequency, equal_width, none };
enum class Similarity { weighted_euclidean, unweighted_euclidean, max_distance, triangular_kernel, minkowski, mean_rank };
enum class Adaptation { median, mean, second_learner_regression, weighted_mean };

// Short names used in canonical tokens and feature-model manifests.
inline constexpr std::array<std::string_view, 2> kSubsetNames{"all", "prune"};
inline constexpr std::array<std::string_view, 8> kWeightNames{"uniform",  "pearson",   "spearman", "varRatio",
                                                              "infoGain", "gainRatio", "chi2",     "relief"};
inline constexpr std::array<std::string_view, 3> kDiscretizationNames{"eqfreq", "eqwidth", "none"};
inline constexpr std::array<std::string_view, 6> kSimilarityNames{"wEuclid",   "uEuclid",   "maxDist",
                                                                  "triKernel", "minkowski", "meanRank"};
inline constexpr std::array<std::string_view, 4> kAdaptationNames{"median", "mean", "regression", "wMean"};
inline constexpr std::array<std::string_view, 6> kAnalogyNames{"k1", "k2", "k3", "k4", "k5", "dynamic"};

/// Schemes that work on binned features and efforts.
bool needs_discretization(WeightScheme scheme);

/// One point of the analogy-estimation design space.
struct AbeConfig {
    SubsetSelection subset = SubsetSelection::remove_nothing;
    WeightScheme weighting = WeightScheme::uniform;
    Discretization discretization = Discretization::none;
    Similarity similarity = Similarity::weighted_euclidean;
    Adaptation adaptation = Adaptation::median;
    /// 1..5 fixed, 0 for dynamic selection by leave-one-out.
    int k = 1;

    /// Binned schemes need a discretizer; k = 1 is canonical only with median.
    bool valid() const;
    /// Canonical token, e.g. "prune|relief|eqfreq|wEuclid|median|k3".
    std::string token() const;

    /// Unit weights, Euclidean distance, nearest single analogy.
    static AbeConfig abe0() { return {}; }

    bool operator==(const AbeConfig&) const = default;
};

AbeConfig parse_abe_token(std::string_view token);

/// Bin index per value. `none` gives each distinct value its own bin (dense rank).
/// Constant columns map to bin 0 under every kind.
std::vector<std::size_t> discretize(std::span<const double> column, Discretization kind, std::size_t bins);

/// Bin count used when a weighting scheme discretizes: 5, capped at floor(sqrt(n)), at least 2.
std::size_t discretization_bins(std::size_t rows);

/// Non-negative weights with mean 1 (all ones when every raw weight is zero).
/// `train` should already be min-max normalized.
std::vector<double> feature_weights(const Dataset& train, WeightScheme scheme, Discretization discretizer,
                                    std::uint64_t seed = 0);

/// Sorted training columns, for rank-based similarity.
class RankIndex {
public:
    RankIndex() = default;
    explicit RankIndex(const Dataset& normalized_train);
    /// Mid-rank of v within feature f's training values, scaled to [0, 1].
    double rank(std::size_t f, double v) const;
    bool empty() const { return sorted_.empty(); }

private:
    std::vector<std::vector<double>> sorted_;
};

struct SimilarityAux {
    const RankIndex* ranks = nullptr;
    double minkowski_p = 3.0;
};

/// Distance between two normalized rows (smaller is more similar).
double similarity(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                  Similarity kind, const SimilarityAux& aux = {});

/// Positions kept by the IQR fence [Q1 - 1.5 IQR, Q3 + 1.5 IQR] on efforts.
std::vector<std::size_t> outlier_keep(std::span<const double> efforts);

class AbeModel {
public:
    struct Neighbor {
        std::size_t position;
        double distance;
    };

    const AbeConfig& config() const { return config_; }
    const std::vector<double>& weights() const { return weights_; }
    /// Resolved analogy count (dynamic selection resolved at fit).
    std::size_t k() const { return k_; }
    const Dataset& table() const { return table_; }
    const MinMaxScaler& scaler() const { return scaler_; }

    /// Training rows ordered by distance, ties by stable row id.
    std::vector<Neighbor> neighbors(std::span<const double> raw_row, std::size_t count) const;
    double predict(std::span<const double> raw_row) const;

private:
    friend AbeModel abe_fit(const Dataset&, const AbeConfig&, std::uint64_t);

    double distance(std::span<const double> a, std::span<const double> b) const;
    std::vector<Neighbor> neighbors_normalized(std::span<const double> row, std::size_t count,
                                               std::size_t skip) const;
    double adapt(std::span<const Neighbor> ranked, std::size_t k, std::span<const double> query) const;

    AbeConfig config_;
    MinMaxScaler scaler_;
    Dataset table_;  // normalized, canonical (row id) order
    std::vector<double> weights_;
    RankIndex ranks_;
    std::size_t k_ = 1;
};

/// Applies subset selection, normalization, weighting and analogy selection.
AbeModel abe_fit(const Dataset& train, const AbeConfig& config, std::uint64_t seed = 0);
double abe_predict(const AbeModel& model, std::span<const double> raw_row);

}  // namespace efftune
