#include "efftune/abe.hpp"

#include "efftune/metrics.hpp"
#include "efftune/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace efftune {

bool needs_discretization(WeightScheme scheme) {
    return scheme == WeightScheme::information_gain || scheme == WeightScheme::gain_ratio ||
           scheme == WeightScheme::chi_squared;
}

bool AbeConfig::valid() const {
    if (k < 0 || k > 5) return false;
    if (needs_discretization(weighting) && discretization == Discretization::none) return false;
    if (k == 1 && adaptation != Adaptation::median) return false;
    return true;
}

std::string AbeConfig::token() const {
    std::string t;
    t += kSubsetNames[static_cast<std::size_t>(subset)];
    t += '|';
    t += kWeightNames[static_cast<std::size_t>(weighting)];
    t += '|';
    t += kDiscretizationNames[static_cast<std::size_t>(discretization)];
    t += '|';
    t += kSimilarityNames[static_cast<std::size_t>(similarity)];
    t += '|';
    t += kAdaptationNames[static_cast<std::size_t>(adaptation)];
    t += '|';
    t += kAnalogyNames[k == 0 ? 5 : static_cast<std::size_t>(k - 1)];
    return t;
}

namespace {

template <std::size_t N>
std::size_t lookup(const std::array<std::string_view, N>& names, std::string_view v) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == v) return i;
    }
    throw std::invalid_argument("unknown ABE option '" + std::string(v) + "'");
}

}  // namespace

AbeConfig parse_abe_token(std::string_view token) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto bar = token.find('|', start);
        parts.push_back(token.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    if (parts.size() != 6) throw std::invalid_argument("ABE token needs 6 fields: " + std::string(token));
    AbeConfig c;
    c.subset = static_cast<SubsetSelection>(lookup(kSubsetNames, parts[0]));
    c.weighting = static_cast<WeightScheme>(lookup(kWeightNames, parts[1]));
    c.discretization = static_cast<Discretization>(lookup(kDiscretizationNames, parts[2]));
    c.similarity = static_cast<Similarity>(lookup(kSimilarityNames, parts[3]));
    c.adaptation = static_cast<Adaptation>(lookup(kAdaptationNames, parts[4]));
    const auto a = lookup(kAnalogyNames, parts[5]);
    c.k = a == 5 ? 0 : static_cast<int>(a) + 1;
    return c;
}

std::vector<std::size_t> discretize(std::span<const double> column, Discretization kind, std::size_t bins) {
    const std::size_t n = column.size();
    std::vector<std::size_t> out(n, 0);
    if (n == 0) return out;
    if (bins < 2) throw std::invalid_argument("discretize: need at least 2 bins");
    const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(lo < hi)) return out;

    switch (kind) {
        case Discretization::equal_width: {
            for (std::size_t i = 0; i < n; ++i) {
                const auto b = static_cast<std::size_t>(std::floor((column[i] - lo) / (hi - lo) * static_cast<double>(bins)));
                out[i] = std::min(b, bins - 1);
            }
            break;
        }
        case Discretization::equal_frequency: {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
            const std::size_t block = (n + bins - 1) / bins;
            for (std::size_t r = 0; r < n; ++r) out[order[r]] = std::min(r / block, bins - 1);
            break;
        }
        case Discretization::none: {
            std::vector<double> uniq(column.begin(), column.end());
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), column[i]) - uniq.begin());
            }
            break;
        }
    }
    return out;
}

std::size_t discretization_bins(std::size_t rows) {
    const auto cap = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(rows))));
    return std::max<std::size_t>(2, std::min<std::size_t>(5, cap));
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> mid_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = mid;
        i = j + 1;
    }
    return r;
}

double entropy(const std::map<std::size_t, double>& counts, double total) {
    double h = 0;
    for (const auto& [k, c] : counts) {
        if (c > 0) h -= c / total * std::log2(c / total);
    }
    return h;
}

double variance(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
}

double variance_ratio_weight(std::span<const double> x, std::span<const double> y) {
    const double total = variance(y);
    if (total <= 0) return 0.0;
    const double cut = median(std::vector<double>(x.begin(), x.end()));
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < x.size(); ++i) (x[i] <= cut ? lo : hi).push_back(y[i]);
    if (lo.empty() || hi.empty()) return 0.0;
    const double within = (static_cast<double>(lo.size()) * variance(lo) + static_cast<double>(hi.size()) * variance(hi)) /
                          static_cast<double>(x.size());
    return std::max(0.0, 1.0 - within / total);
}

struct BinnedStats {
    double info_gain = 0;
    double gain_ratio = 0;
    double chi2 = 0;
};

BinnedStats binned_stats(const std::vector<std::size_t>& xb, const std::vector<std::size_t>& yb) {
    const double n = static_cast<double>(xb.size());
    std::map<std::size_t, double> cx, cy;
    std::map<std::pair<std::size_t, std::size_t>, double> cxy;
    for (std::size_t i = 0; i < xb.size(); ++i) {
        cx[xb[i]] += 1;
        cy[yb[i]] += 1;
        cxy[{xb[i], yb[i]}] += 1;
    }
    const double hy = entropy(cy, n);
    const double hx = entropy(cx, n);
    double hy_given_x = 0;
    for (const auto& [xv, nx] : cx) {
        std::map<std::size_t, double> sub;
        for (const auto& [yv, ny] : cy) {
            auto it = cxy.find({xv, yv});
            if (it != cxy.end()) sub[yv] = it->second;
        }
        hy_given_x += nx / n * entropy(sub, nx);
    }
    BinnedStats s;
    s.info_gain = std::max(0.0, hy - hy_given_x);
    s.gain_ratio = hx > 0 ? s.info_gain / hx : 0.0;
    for (const auto& [xv, nx] : cx) {
        for (const auto& [yv, ny] : cy) {
            const double expected = nx * ny / n;
            auto it = cxy.find({xv, yv});
            const double observed = it == cxy.end() ? 0.0 : it->second;
            s.chi2 += (observed - expected) * (observed - expected) / expected;
        }
    }
    return s;
}

// RReliefF with uniform neighbor influence over the k nearest (Manhattan) rows.
std::vector<double> relief_weights(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.row_count();
    const std::size_t f = d.feature_count();
    std::vector<double> w(f, 0.0);
    if (n < 2) return w;
    const auto& e = d.efforts();
    const auto [elo, ehi] = std::minmax_element(e.begin(), e.end());
    const double erange = *ehi - *elo;
    if (erange <= 0) return w;

    std::vector<std::size_t> instances(n);
    std::iota(instances.begin(), instances.end(), std::size_t{0});
    constexpr std::size_t kMaxInstances = 100;
    if (n > kMaxInstances) {
        Rng rng(seed);
        rng.shuffle(instances);
        instances.resize(kMaxInstances);
        std::sort(instances.begin(), instances.end());
    }
    const std::size_t k = std::min<std::size_t>(10, n - 1);

    double n_dc = 0;
    std::vector<double> n_da(f, 0.0), n_dcda(f, 0.0);
    std::vector<std::pair<double, std::size_t>> dist;
    for (auto i : instances) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0;
            for (std::size_t a = 0; a < f; ++a) s += std::abs(d.at(i, a) - d.at(j, a));
            dist.emplace_back(s, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        const double influence = 1.0 / static_cast<double>(k);
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t j = dist[t].second;
            const double dc = std::abs(e[i] - e[j]) / erange;
            n_dc += dc * influence;
            for (std::size_t a = 0; a < f; ++a) {
                const double da = std::abs(d.at(i, a) - d.at(j, a));
                n_da[a] += da * influence;
                n_dcda[a] += dc * da * influence;
            }
        }
    }
    const double m = static_cast<double>(instances.size());
    for (std::size_t a = 0; a < f; ++a) {
        double v = 0;
        if (n_dc > 0) v += n_dcda[a] / n_dc;
        if (m - n_dc > 0) v -= (n_da[a] - n_dcda[a]) / (m - n_dc);
        w[a] = std::max(0.0, v);
    }
    return w;
}

}  // namespace

std::vector<double> feature_weights(const Dataset& train, WeightScheme scheme, Discretization discretizer,
                                    std::uint64_t seed) {
    if (needs_discretization(scheme) && discretizer == Discretization::none) {
        throw std::invalid_argument(std::string("weighting scheme ") +
                                    std::string(kWeightNames[static_cast<std::size_t>(scheme)]) +
                                    " requires a discretizer");
    }
    const std::size_t f = train.feature_count();
    std::vector<double> w(f, 1.0);
    if (scheme == WeightScheme::uniform || f == 0) return w;

    const auto& y = train.efforts();
    if (scheme == WeightScheme::relief) {
        w = relief_weights(train, seed);
    } else {
        const std::size_t bins = discretization_bins(train.row_count());
        std::vector<std::size_t> yb;
        if (needs_discretization(scheme)) yb = discretize(y, discretizer, bins);
        const auto y_ranks = mid_ranks(y);
        for (std::size_t a = 0; a < f; ++a) {
            const auto x = train.column(a);
            switch (scheme) {
                case WeightScheme::pearson_correlation: w[a] = std::abs(pearson(x, y)); break;
                case WeightScheme::spearman_correlation: w[a] = std::abs(pearson(mid_ranks(x), y_ranks)); break;
                case WeightScheme::variance_ratio: w[a] = variance_ratio_weight(x, y); break;
                case WeightScheme::information_gain:
                case WeightScheme::gain_ratio:
                case WeightScheme::chi_squared: {
                    const auto s = binned_stats(discretize(x, discretizer, bins), yb);
                    w[a] = scheme == WeightScheme::information_gain ? s.info_gain
                           : scheme == WeightScheme::gain_ratio     ? s.gain_ratio
                                                                    : s.chi2;
                    break;
                }
                default: break;
            }
        }
    }
    for (auto& v : w) {
        if (!std::isfinite(v) || v < 0) v = 0;
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (sum <= 0) return std::vector<double>(f, 1.0);
    for (auto& v : w) v *= static_cast<double>(f) / sum;
    return w;
}

RankIndex::RankIndex(const Dataset& normalized_train) {
    sorted_.resize(normalized_train.feature_count());
    for (std::size_t f = 0; f < sorted_.size(); ++f) {
        sorted_[f] = normalized_train.column(f);
        std::sort(sorted_[f].begin(), sorted_[f].end());
    }
}

double RankIndex::rank(std::size_t f, double v) const {
    const auto& s = sorted_.at(f);
    if (s.empty()) return 0.0;
    const auto lo = std::lower_bound(s.begin(), s.end(), v);
    const auto hi = std::upper_bound(lo, s.end(), v);
    const double below = static_cast<double>(lo - s.begin());
    const double equal = static_cast<double>(hi - lo);
    return (below + equal / 2.0) / static_cast<double>(s.size());
}

double similarity(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                  Similarity kind, const SimilarityAux& aux) {
    if (a.size() != b.size() || (kind != Similarity::unweighted_euclidean && weights.size() != a.size())) {
        throw std::invalid_argument("similarity: arity mismatch");
    }
    const std::size_t n = a.size();
    auto w = [&](std::size_t i) { return kind == Similarity::unweighted_euclidean ? 1.0 : weights[i]; };
    switch (kind) {
        case Similarity::weighted_euclidean:
        case Similarity::unweighted_euclidean:
        case Similarity::triangular_kernel: {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += w(i) * (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(s);
        }
        case Similarity::max_distance: {
            double m = 0;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, w(i) * std::abs(a[i] - b[i]));
            return m;
        }
        case Similarity::minkowski: {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += w(i) * std::pow(std::abs(a[i] - b[i]), aux.minkowski_p);
            return std::pow(s, 1.0 / aux.minkowski_p);
        }
        case Similarity::mean_rank: {
            if (!aux.ranks || aux.ranks->empty()) throw std::invalid_argument("mean_rank similarity needs a rank index");
            if (n == 0) return 0.0;
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += w(i) * std::abs(aux.ranks->rank(i, a[i]) - aux.ranks->rank(i, b[i]));
            return s / static_cast<double>(n);
        }
    }
    return 0.0;
}

std::vector<std::size_t> outlier_keep(std::span<const double> efforts) {
    std::vector<std::size_t> keep;
    if (efforts.empty()) return keep;
    std::vector<double> v(efforts.begin(), efforts.end());
    const double q1 = percentile(v, 25), q3 = percentile(v, 75);
    const double fence = 1.5 * (q3 - q1);
    for (std::size_t i = 0; i < efforts.size(); ++i) {
        if (efforts[i] >= q1 - fence && efforts[i] <= q3 + fence) keep.push_back(i);
    }
    return keep;
}

namespace {

// Running estimate for the first k neighbors, k = 1, 2, ...; queried at each k.
class Adapter {
public:
    Adapter(Adaptation kind, bool kernel, std::span<const AbeModel::Neighbor> ranked, const Dataset& table,
            std::span<const double> query)
        : kind_(kind), kernel_(kernel), ranked_(ranked), table_(table), query_(query) {
        if (kind_ == Adaptation::second_learner_regression) {
            const auto p = static_cast<Eigen::Index>(table.feature_count() + 1);
            gram_ = Eigen::MatrixXd::Zero(p, p);
            moment_ = Eigen::VectorXd::Zero(p);
        }
    }

    /// Adds neighbor number k (1-based) and returns the estimate over the first k.
    double add() {
        const auto& nb = ranked_[k_];
        const double e = table_.effort(nb.position);
        ++k_;
        sum_ += e;
        rank_sum_ += e / static_cast<double>(k_);
        rank_norm_ += 1.0 / static_cast<double>(k_);
        sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), e), e);
        if (kind_ == Adaptation::second_learner_regression) accumulate(nb.position, e);

        switch (kind_) {
            case Adaptation::median: return middle();
            case Adaptation::mean: return kernel_ ? kernel_mean(false) : sum_ / static_cast<double>(k_);
            case Adaptation::weighted_mean: return kernel_ ? kernel_mean(true) : rank_sum_ / rank_norm_;
            case Adaptation::second_learner_regression: return regress();
        }
        return sum_ / static_cast<double>(k_);
    }

private:
    double middle() const {
        const std::size_t n = sorted_.size();
        return n % 2 ? sorted_[n / 2] : (sorted_[n / 2 - 1] + sorted_[n / 2]) / 2.0;
    }

    // Triangular kernel: weight 1 - d/bandwidth, bandwidth = distance of the next neighbor.
    double kernel_mean(bool by_rank) const {
        const double bandwidth = k_ < ranked_.size() ? ranked_[k_].distance : ranked_[k_ - 1].distance;
        double num = 0, den = 0;
        if (bandwidth > 0) {
            for (std::size_t j = 0; j < k_; ++j) {
                double w = std::max(0.0, 1.0 - ranked_[j].distance / bandwidth);
                if (by_rank) w /= static_cast<double>(j + 1);
                num += w * table_.effort(ranked_[j].position);
                den += w;
            }
        }
        if (den <= 0) return by_rank ? rank_sum_ / rank_norm_ : sum_ / static_cast<double>(k_);
        return num / den;
    }

    void accumulate(std::size_t position, double e) {
        const auto p = gram_.rows();
        Eigen::VectorXd z(p);
        z(0) = 1.0;
        auto row = table_.row(position);
        for (Eigen::Index i = 1; i < p; ++i) z(i) = row[static_cast<std::size_t>(i - 1)];
        gram_.noalias() += z * z.transpose();
        moment_ += e * z;
    }

    double regress() const {
        const auto p = gram_.rows();
        if (static_cast<Eigen::Index>(k_) < p) return sum_ / static_cast<double>(k_);
        Eigen::VectorXd beta = gram_.completeOrthogonalDecomposition().solve(moment_);
        double y = beta(0);
        for (Eigen::Index i = 1; i < p; ++i) y += beta(i) * query_[static_cast<std::size_t>(i - 1)];
        return std::isfinite(y) ? y : sum_ / static_cast<double>(k_);
    }

    Adaptation kind_;
    bool kernel_;
    std::span<const AbeModel::Neighbor> ranked_;
    const Dataset& table_;
    std::span<const double> query_;
    std::size_t k_ = 0;
    double sum_ = 0, rank_sum_ = 0, rank_norm_ = 0;
    std::vector<double> sorted_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd moment_;
};

}  // namespace

double AbeModel::distance(std::span<const double> a, std::span<const double> b) const {
    SimilarityAux aux;
    aux.ranks = &ranks_;
    return similarity(a, b, weights_, config_.similarity, aux);
}

std::vector<AbeModel::Neighbor> AbeModel::neighbors_normalized(std::span<const double> row, std::size_t count,
                                                               std::size_t skip) const {
    std::vector<Neighbor> all;
    all.reserve(table_.row_count());
    for (std::size_t i = 0; i < table_.row_count(); ++i) {
        if (i == skip) continue;
        all.push_back({i, distance(row, table_.row(i))});
    }
    count = std::min(count, all.size());
    // Table rows are in row-id order, so position order is the stable-key order.
    auto closer = [](const Neighbor& x, const Neighbor& y) {
        return x.distance < y.distance || (x.distance == y.distance && x.position < y.position);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(), closer);
    all.resize(count);
    return all;
}

std::vector<AbeModel::Neighbor> AbeModel::neighbors(std::span<const double> raw_row, std::size_t count) const {
    auto q = scaler_.transform(raw_row);
    return neighbors_normalized(q, count, std::numeric_limits<std::size_t>::max());
}

double AbeModel::adapt(std::span<const Neighbor> ranked, std::size_t k, std::span<const double> query) const {
    Adapter adapter(config_.adaptation, config_.similarity == Similarity::triangular_kernel, ranked, table_, query);
    double estimate = 0;
    for (std::size_t i = 0; i < k; ++i) estimate = adapter.add();
    return estimate;
}

double AbeModel::predict(std::span<const double> raw_row) const {
    if (raw_row.size() != table_.feature_count()) throw std::invalid_argument("ABE arity mismatch");
    auto q = scaler_.transform(raw_row);
    // One extra neighbor gives the triangular kernel its bandwidth.
    auto ranked = neighbors_normalized(q, k_ + 1, std::numeric_limits<std::size_t>::max());
    return adapt(ranked, std::min(k_, ranked.size()), q);
}

AbeModel abe_fit(const Dataset& train, const AbeConfig& config, std::uint64_t seed) {
    if (!config.valid()) throw std::invalid_argument("invalid ABE configuration " + config.token());
    if (train.row_count() < 2) throw std::invalid_argument("ABE needs at least 2 training rows");

    // Canonical row order makes the fit independent of how rows arrive.
    std::vector<std::size_t> order(train.row_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return train.row_ids()[a] < train.row_ids()[b]; });
    Dataset rows = train.subset(order);

    if (config.subset == SubsetSelection::outlier_prune) {
        auto keep = outlier_keep(rows.efforts());
        rows = rows.subset(keep);
        if (rows.row_count() < 2) throw std::invalid_argument("ABE: fewer than 2 rows left after pruning");
    }

    AbeModel m;
    m.config_ = config;
    auto normalized = normalize_minmax(rows);
    m.scaler_ = std::move(normalized.scaler);
    m.table_ = std::move(normalized.data);
    m.weights_ = feature_weights(m.table_, config.weighting, config.discretization, seed);
    if (config.similarity == Similarity::mean_rank) m.ranks_ = RankIndex(m.table_);

    const std::size_t n = m.table_.row_count();
    if (config.k > 0) {
        m.k_ = std::min<std::size_t>(static_cast<std::size_t>(config.k), n);
        return m;
    }

    // Dynamic selection: leave-one-out median MRE for every k in [1, n-1].
    const std::size_t kmax = n - 1;
    std::vector<std::vector<double>> errors(kmax);
    const bool kernel = config.similarity == Similarity::triangular_kernel;
    for (std::size_t i = 0; i < n; ++i) {
        const double actual = m.table_.effort(i);
        if (!(actual > 0)) continue;
        auto ranked = m.neighbors_normalized(m.table_.row(i), n - 1, i);
        Adapter adapter(config.adaptation, kernel, ranked, m.table_, m.table_.row(i));
        for (std::size_t k = 1; k <= kmax; ++k) errors[k - 1].push_back(mre(actual, adapter.add()));
    }
    m.k_ = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= kmax; ++k) {
        if (errors[k - 1].empty()) continue;
        const double score = median(errors[k - 1]);
        if (score < best) {
            best = score;
            m.k_ = k;
        }
    }
    return m;
}

double abe_predict(const AbeModel& model, std::span<const double> raw_row) { return model.predict(raw_row); }

}  // namespace efftune
