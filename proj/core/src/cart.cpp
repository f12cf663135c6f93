#include "efftune/cart.hpp"

#include "efftune/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace efftune {

double TreeModel::predict(std::span<const double> row) const {
    return nodes_[leaf_of(row)].value;
}

std::size_t TreeModel::leaf_of(std::span<const double> row) const {
    if (nodes_.empty()) throw std::logic_error("predict on an unfitted tree");
    if (row.size() != feature_count_) {
        throw std::invalid_argument("tree expects " + std::to_string(feature_count_) + " features, got " +
                                    std::to_string(row.size()));
    }
    std::size_t at = 0;
    while (!nodes_[at].is_leaf()) {
        const auto& n = nodes_[at];
        at = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return at;
}

std::size_t TreeModel::internal_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf(); }));
}

std::size_t TreeModel::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

std::string TreeModel::dump(std::span<const std::string> feature_names) const {
    std::ostringstream out;
    auto name_of = [&](int f) {
        auto i = static_cast<std::size_t>(f);
        return i < feature_names.size() ? feature_names[i] : "x" + std::to_string(i);
    };
    auto walk = [&](auto&& self, std::size_t at) -> void {
        const auto& n = nodes_[at];
        std::string pad(2 * n.depth, ' ');
        if (n.is_leaf()) {
            out << pad << "leaf " << n.value << " (n=" << n.count << ")\n";
            return;
        }
        out << pad << name_of(n.feature) << " <= " << n.threshold << " (n=" << n.count << ")\n";
        self(self, n.left);
        out << pad << name_of(n.feature) << " > " << n.threshold << "\n";
        self(self, n.right);
    };
    if (!nodes_.empty()) walk(walk, 0);
    return out.str();
}

namespace {

double population_sd(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

class TreeBuilder {
public:
    TreeBuilder(std::span<const double> cells, std::size_t features, std::span<const double> targets,
                const CartParams& params, std::uint64_t seed)
        : cells_(cells), features_(features), targets_(targets), params_(params), rng_(seed) {
        const double frac = std::clamp(params.max_features, 0.0, 1.0);
        per_node_ = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(features) - 1e-12));
        per_node_ = std::clamp<std::size_t>(per_node_, 1, std::max<std::size_t>(features, 1));
    }

    std::vector<TreeModel::Node> build() {
        std::vector<std::size_t> rows(targets_.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        grow(rows, 0);
        return std::move(nodes_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double score = std::numeric_limits<double>::infinity();
        std::size_t left_count = 0;
    };

    double x(std::size_t row, std::size_t f) const { return cells_[row * features_ + f]; }

    std::size_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        {
            auto& n = nodes_[id];
            n.count = rows.size();
            n.depth = depth;
            double sum = 0;
            for (auto r : rows) sum += targets_[r];
            n.value = sum / static_cast<double>(rows.size());
        }

        if (!may_split(rows, depth)) return id;
        Split best = find_split(rows);
        if (best.feature < 0) return id;

        const auto f = static_cast<std::size_t>(best.feature);
        std::vector<std::size_t> left, right;
        for (auto r : rows) (x(r, f) <= best.threshold ? left : right).push_back(r);

        nodes_[id].feature = best.feature;
        nodes_[id].threshold = best.threshold;
        nodes_[id].score = best.score;
        std::size_t l = grow(left, depth + 1);
        nodes_[id].left = l;
        std::size_t r = grow(right, depth + 1);
        nodes_[id].right = r;
        return id;
    }

    bool may_split(const std::vector<std::size_t>& rows, std::size_t depth) const {
        const std::size_t n = rows.size();
        if (n < 2) return false;
        if (params_.min_sample_split > 0 && n <= static_cast<std::size_t>(params_.min_sample_split)) return false;
        if (params_.max_depth && depth >= static_cast<std::size_t>(std::max(*params_.max_depth, 0))) return false;
        const double first = targets_[rows.front()];
        return std::any_of(rows.begin(), rows.end(), [&](std::size_t r) { return targets_[r] != first; });
    }

    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> all(features_);
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (per_node_ >= features_) return all;
        for (std::size_t i = 0; i < per_node_; ++i) {
            std::swap(all[i], all[i + rng_.below(features_ - i)]);
        }
        all.resize(per_node_);
        std::sort(all.begin(), all.end());
        return all;
    }

    Split find_split(const std::vector<std::size_t>& rows) {
        const std::size_t n = rows.size();
        const std::size_t min_leaf = static_cast<std::size_t>(std::max(params_.min_samples_leaf, 1));
        Split best;
        if (n < 2 * min_leaf) return best;

        // Prefix sums screen the cut points; anything within their rounding error
        // of the best is rescored with the two-pass formula.
        double shift = 0;
        for (auto r : rows) shift += targets_[r];
        shift /= static_cast<double>(n);
        double spread = 0;
        for (auto r : rows) spread += (targets_[r] - shift) * (targets_[r] - shift);
        const double slack = 1e-6 * std::sqrt(spread / static_cast<double>(n)) + 1e-300;

        std::vector<std::size_t> order(rows);
        std::vector<double> prefix(n + 1), prefix_sq(n + 1), sorted(n);
        for (auto f : candidate_features()) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
            for (std::size_t i = 0; i < n; ++i) {
                sorted[i] = targets_[order[i]];
                const double t = sorted[i] - shift;
                prefix[i + 1] = prefix[i] + t;
                prefix_sq[i + 1] = prefix_sq[i] + t * t;
            }
            for (std::size_t i = min_leaf; i + min_leaf <= n; ++i) {
                const double lo = x(order[i - 1], f);
                const double hi = x(order[i], f);
                if (!(lo < hi)) continue;
                const double nl = static_cast<double>(i);
                const double nr = static_cast<double>(n - i);
                const double sl = prefix[i], ql = prefix_sq[i];
                const double sr = prefix[n] - sl, qr = prefix_sq[n] - ql;
                const double vl = std::max(0.0, ql / nl - (sl / nl) * (sl / nl));
                const double vr = std::max(0.0, qr / nr - (sr / nr) * (sr / nr));
                const double approx = (std::sqrt(vl) * nl + std::sqrt(vr) * nr) / static_cast<double>(n);
                if (approx > best.score + slack) continue;
                const std::span<const double> all(sorted);
                const double score = split_score(all.first(i), all.subspan(i));
                if (score < best.score) {
                    double mid = lo + (hi - lo) / 2;
                    if (!(mid < hi)) mid = lo;
                    best = {static_cast<int>(f), mid, score, i};
                }
            }
        }
        return best;
    }

    std::span<const double> cells_;
    std::size_t features_;
    std::span<const double> targets_;
    CartParams params_;
    Rng rng_;
    std::size_t per_node_ = 1;
    std::vector<TreeModel::Node> nodes_;
};

}  // namespace

double split_score(std::span<const double> left_targets, std::span<const double> right_targets) {
    const double nl = static_cast<double>(left_targets.size());
    const double nr = static_cast<double>(right_targets.size());
    if (nl + nr == 0) return 0.0;
    return (population_sd(left_targets) * nl + population_sd(right_targets) * nr) / (nl + nr);
}

TreeModel cart_fit(std::span<const double> cells, std::size_t feature_count, std::span<const double> targets,
                   const CartParams& params, std::uint64_t seed) {
    if (targets.empty()) throw std::invalid_argument("cart_fit: empty training set");
    if (cells.size() != targets.size() * feature_count) {
        throw std::invalid_argument("cart_fit: cell count does not match rows x features");
    }
    if (feature_count == 0) {
        std::vector<TreeModel::Node> single(1);
        single[0].count = targets.size();
        single[0].value = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
        return TreeModel(0, std::move(single));
    }
    TreeBuilder builder(cells, feature_count, targets, params, seed);
    return TreeModel(feature_count, builder.build());
}

TreeModel cart_fit(const Dataset& train, const CartParams& params, std::uint64_t seed) {
    return cart_fit(train.cells(), train.feature_count(), train.efforts(), params, seed);
}

double cart_predict(const TreeModel& model, std::span<const double> row) { return model.predict(row); }

double ForestModel::predict(std::span<const double> row) const {
    if (trees_.empty()) throw std::logic_error("predict on an empty forest");
    double sum = 0;
    for (const auto& t : trees_) sum += t.predict(row);
    return sum / static_cast<double>(trees_.size());
}

ForestModel rf_fit(const Dataset& train, const ForestOptions& options, std::uint64_t seed) {
    if (train.empty()) throw std::invalid_argument("rf_fit: empty training set");
    if (options.n_trees < 1) throw std::invalid_argument("rf_fit: n_trees must be >= 1");
    CartParams params;
    const double features = static_cast<double>(std::max<std::size_t>(train.feature_count(), 1));
    params.max_features = options.max_features.value_or(std::ceil(std::sqrt(features)) / features);

    const std::size_t n = train.row_count();
    std::vector<TreeModel> trees;
    trees.reserve(options.n_trees);
    std::vector<double> cells(train.cells().size());
    std::vector<double> targets(n);
    for (std::size_t t = 0; t < options.n_trees; ++t) {
        const std::uint64_t tree_seed = mix_seed({seed, t});
        if (!options.bootstrap) {
            trees.push_back(cart_fit(train, params, tree_seed));
            continue;
        }
        Rng rng(mix_seed({tree_seed, 0xB007}));
        const std::size_t f = train.feature_count();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = rng.below(n);
            auto row = train.row(pick);
            std::copy(row.begin(), row.end(), cells.begin() + static_cast<std::ptrdiff_t>(i * f));
            targets[i] = train.effort(pick);
        }
        trees.push_back(cart_fit(cells, f, targets, params, tree_seed));
    }
    return ForestModel(std::move(trees));
}

double rf_predict(const ForestModel& model, std::span<const double> row) { return model.predict(row); }

}  // namespace efftune
