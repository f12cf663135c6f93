#pragma once

#include "efftune/dataset.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace efftune {

/// The four tunable knobs of the regression tree.
struct CartParams {
    /// Fraction of features examined per node, in (0, 1].
    double max_features = 1.0;
    /// Depth cap; the root is depth 0. Unlimited when empty.
    std::optional<int> max_depth;
    /// A node splits only when it holds more rows than this.
    int min_sample_split = 2;
    /// Each child of a split must keep at least this many rows.
    int min_samples_leaf = 1;

    bool operator==(const CartParams&) const = default;
};

/// Fitted regression tree. Internal nodes route rows with x <= threshold left.
class TreeModel {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double value = 0.0;  // mean target of the node's rows
        std::size_t count = 0;
        std::size_t depth = 0;
        double score = 0.0;  // split score of the chosen split (internal nodes)

        bool is_leaf() const { return feature < 0; }
    };

    TreeModel() = default;
    TreeModel(std::size_t feature_count, std::vector<Node> nodes)
        : feature_count_(feature_count), nodes_(std::move(nodes)) {}

    double predict(std::span<const double> row) const;
    /// Index of the leaf a row lands in.
    std::size_t leaf_of(std::span<const double> row) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t internal_count() const;
    std::size_t depth() const;
    std::size_t feature_count() const { return feature_count_; }

    /// Indented plain-text rendering: feature, threshold, leaf mean, leaf count.
    std::string dump(std::span<const std::string> feature_names = {}) const;

private:
    std::size_t feature_count_ = 0;
    std::vector<Node> nodes_;
};

/// Split score: sum over children of sqrt(variance) weighted by child share.
double split_score(std::span<const double> left_targets, std::span<const double> right_targets);

TreeModel cart_fit(const Dataset& train, const CartParams& params, std::uint64_t seed);
/// Fits on a raw row-major matrix; targets may be any finite reals.
TreeModel cart_fit(std::span<const double> cells, std::size_t feature_count,
                   std::span<const double> targets, const CartParams& params, std::uint64_t seed);

double cart_predict(const TreeModel& model, std::span<const double> row);

struct ForestOptions {
    std::size_t n_trees = 100;
    /// Resample rows with replacement per tree. Off only in tests.
    bool bootstrap = true;
    /// Per-node feature fraction; ceil(sqrt(features)) features when empty.
    std::optional<double> max_features;
};

class ForestModel {
public:
    ForestModel() = default;
    explicit ForestModel(std::vector<TreeModel> trees) : trees_(std::move(trees)) {}

    /// Mean of the member trees' predictions.
    double predict(std::span<const double> row) const;
    const std::vector<TreeModel>& trees() const { return trees_; }

private:
    std::vector<TreeModel> trees_;
};

ForestModel rf_fit(const Dataset& train, const ForestOptions& options, std::uint64_t seed);
double rf_predict(const ForestModel& model, std::span<const double> row);

}  // namespace efftune
