#include "efftune/abe.hpp"
#include "efftune/configspace.hpp"
#include "efftune/metrics.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace efftune;
using testing_support::make_dataset;

TEST(AbeConfig, TokensRoundTrip) {
    AbeConfig c;
    c.subset = SubsetSelection::outlier_prune;
    c.weighting = WeightScheme::relief;
    c.discretization = Discretization::equal_frequency;
    c.k = 3;
    EXPECT_EQ(c.token(), "prune|relief|eqfreq|wEuclid|median|k3");
    EXPECT_EQ(parse_abe_token(c.token()), c);
    EXPECT_EQ(parse_abe_token("all|uniform|none|wEuclid|median|dynamic").k, 0);
    EXPECT_THROW(parse_abe_token("all|uniform"), std::invalid_argument);
    EXPECT_THROW(parse_abe_token("all|bogus|none|wEuclid|median|k1"), std::invalid_argument);
}

TEST(AbeConfig, Validity) {
    AbeConfig c;
    EXPECT_TRUE(c.valid());
    c.weighting = WeightScheme::information_gain;
    EXPECT_FALSE(c.valid());
    c.discretization = Discretization::equal_width;
    EXPECT_TRUE(c.valid());
    c.adaptation = Adaptation::mean;
    EXPECT_FALSE(c.valid());
    c.k = 2;
    EXPECT_TRUE(c.valid());
}

TEST(Abe, Abe0HasUnitWeights) {
    auto d = make_dataset({{1, 5}, {2, 3}, {3, 9}}, {10, 20, 30});
    auto m = abe_fit(d, AbeConfig::abe0());
    EXPECT_EQ(m.weights(), (std::vector<double>{1, 1}));
    EXPECT_EQ(m.k(), 1u);
}

TEST(Abe, OutlierPruneDropsTheExtremeRow) {
    auto d = make_dataset({{1}, {2}, {3}, {4}, {5}}, {10, 11, 12, 13, 1000});
    AbeConfig c;
    c.subset = SubsetSelection::outlier_prune;
    auto m = abe_fit(d, c);
    EXPECT_EQ(m.table().row_count(), 4u);
    const auto& e = m.table().efforts();
    EXPECT_EQ(std::count(e.begin(), e.end(), 1000.0), 0);
    EXPECT_EQ(outlier_keep(std::vector<double>{10, 11, 12, 13, 1000}), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Abe, PruningBelowTwoRowsFails) {
    auto d = make_dataset({{1}, {2}}, {10, 1000});
    AbeConfig c;
    c.subset = SubsetSelection::outlier_prune;
    EXPECT_NO_THROW(abe_fit(d, c));
    EXPECT_THROW(abe_fit(make_dataset({{1}}, {1}), AbeConfig::abe0()), std::invalid_argument);
    AbeConfig bad;
    bad.weighting = WeightScheme::chi_squared;
    EXPECT_THROW(abe_fit(d, bad), std::invalid_argument);
}

TEST(Abe, DynamicKOnExactNeighborsResolvesToOne) {
    // Pairs of identical rows: the leave-one-out 1-NN is always an exact copy.
    std::vector<std::vector<double>> rows;
    std::vector<double> e;
    for (int i = 0; i < 8; ++i) {
        for (int copy = 0; copy < 2; ++copy) {
            rows.push_back({double(i), double(i * i % 5)});
            e.push_back(10.0 + 7 * i);
        }
    }
    AbeConfig c;
    c.k = 0;
    auto m = abe_fit(make_dataset(rows, e), c);
    EXPECT_EQ(m.k(), 1u);
}

TEST(Abe, DynamicKMatchesLeaveOneOutOracle) {
    std::mt19937_64 gen(40);
    auto d = testing_support::random_dataset(gen, 14, 2, 9);
    AbeConfig c;
    c.k = 0;
    c.adaptation = Adaptation::mean;
    c.similarity = Similarity::unweighted_euclidean;
    auto m = abe_fit(d, c);
    const auto table = oracle::scale_like(testing_support::rows_of(d), testing_support::rows_of(d));
    const std::size_t n = d.row_count();
    double best = 1e300;
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> errs;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<double, std::size_t>> ds;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double s = 0;
                for (std::size_t f = 0; f < 2; ++f) s += std::pow(table[i][f] - table[j][f], 2);
                ds.emplace_back(std::sqrt(s), j);
            }
            std::sort(ds.begin(), ds.end());
            double sum = 0;
            for (std::size_t t = 0; t < k; ++t) sum += d.effort(ds[t].second);
            errs.push_back(std::abs(d.effort(i) - sum / k) / d.effort(i));
        }
        const double med = oracle::median(errs);
        if (med < best) {
            best = med;
            best_k = k;
        }
    }
    EXPECT_EQ(m.k(), best_k);
}

TEST(Abe, ExactMatchReturnsItsEffort) {
    auto d = make_dataset({{1, 1}, {5, 2}, {9, 7}, {3, 3}}, {11, 22, 33, 44});
    for (auto s : {Similarity::weighted_euclidean, Similarity::unweighted_euclidean, Similarity::max_distance,
                   Similarity::triangular_kernel, Similarity::minkowski, Similarity::mean_rank}) {
        AbeConfig c;
        c.similarity = s;
        auto m = abe_fit(d, c);
        for (std::size_t i = 0; i < d.row_count(); ++i) {
            EXPECT_DOUBLE_EQ(m.predict(d.row(i)), d.effort(i)) << static_cast<int>(s);
        }
    }
}

TEST(Abe, MeanAndMedianOfThreeNeighbors) {
    auto d = make_dataset({{0}, {1}, {2}, {10}}, {10, 20, 60, 1000});
    AbeConfig c;
    c.k = 3;
    c.adaptation = Adaptation::mean;
    std::vector<double> q{0.9};
    EXPECT_DOUBLE_EQ(abe_fit(d, c).predict(q), 30);
    c.adaptation = Adaptation::median;
    EXPECT_DOUBLE_EQ(abe_fit(d, c).predict(q), 20);
}

TEST(Abe, WeightedMeanUsesInverseRank) {
    auto d = make_dataset({{0}, {1}, {2}, {10}}, {10, 20, 60, 1000});
    AbeConfig c;
    c.k = 3;
    c.adaptation = Adaptation::weighted_mean;
    std::vector<double> q{0};
    EXPECT_NEAR(abe_fit(d, c).predict(q), (10 + 20 / 2.0 + 60 / 3.0) / (1 + 0.5 + 1 / 3.0), 1e-12);
}

TEST(Abe, RegressionAdaptationFitsLocalLine) {
    std::vector<std::vector<double>> rows;
    std::vector<double> e;
    for (int i = 0; i <= 10; ++i) {
        rows.push_back({double(i)});
        e.push_back(5 + 3.0 * i);
    }
    AbeConfig c;
    c.k = 4;
    c.adaptation = Adaptation::second_learner_regression;
    std::vector<double> q{4.5};
    EXPECT_NEAR(abe_fit(make_dataset(rows, e), c).predict(q), 5 + 3 * 4.5, 1e-9);
}

TEST(Abe, ArityMismatchThrows) {
    auto m = abe_fit(make_dataset({{1, 2}, {3, 4}}, {1, 2}), AbeConfig::abe0());
    std::vector<double> bad{1};
    EXPECT_THROW(m.predict(bad), std::invalid_argument);
}

TEST(Similarity, Formulas) {
    std::vector<double> a{0, 0}, b{1, 1}, w{1, 1};
    EXPECT_DOUBLE_EQ(similarity(a, b, w, Similarity::weighted_euclidean), std::sqrt(2.0));
    EXPECT_NEAR(similarity(a, b, w, Similarity::minkowski), std::cbrt(2.0), 1e-12);
    std::vector<double> w2{4, 1};
    EXPECT_DOUBLE_EQ(similarity(a, b, w2, Similarity::unweighted_euclidean), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(similarity(a, b, w2, Similarity::max_distance), 4.0);
    for (auto s : {Similarity::weighted_euclidean, Similarity::unweighted_euclidean, Similarity::max_distance,
                   Similarity::triangular_kernel, Similarity::minkowski}) {
        EXPECT_EQ(similarity(b, b, w, s), 0.0);
    }
    std::vector<double> c{1};
    EXPECT_THROW(similarity(a, c, w, Similarity::weighted_euclidean), std::invalid_argument);
    EXPECT_THROW(similarity(a, b, w, Similarity::mean_rank), std::invalid_argument);
}

TEST(Similarity, MeanRankUsesTrainingRanks) {
    auto d = make_dataset({{0}, {1}, {2}, {3}}, {1, 1, 1, 1});
    RankIndex idx(d);
    SimilarityAux aux;
    aux.ranks = &idx;
    std::vector<double> a{0}, b{3}, w{1};
    EXPECT_NEAR(similarity(a, b, w, Similarity::mean_rank, aux), 0.75, 1e-12);
    EXPECT_EQ(similarity(a, a, w, Similarity::mean_rank, aux), 0.0);
}

TEST(Discretize, Examples) {
    EXPECT_EQ(discretize(std::vector<double>{1, 2, 3, 4}, Discretization::equal_width, 2),
              (std::vector<std::size_t>{0, 0, 1, 1}));
    EXPECT_EQ(discretize(std::vector<double>{1, 1, 1, 100}, Discretization::equal_frequency, 2),
              (std::vector<std::size_t>{0, 0, 1, 1}));
    for (auto k : {Discretization::equal_width, Discretization::equal_frequency, Discretization::none}) {
        EXPECT_EQ(discretize(std::vector<double>{7, 7, 7}, k, 3), (std::vector<std::size_t>{0, 0, 0}));
    }
    EXPECT_EQ(discretize(std::vector<double>{5, 1, 5, 3}, Discretization::none, 2),
              (std::vector<std::size_t>{2, 0, 2, 1}));
    EXPECT_EQ(discretization_bins(4), 2u);
    EXPECT_EQ(discretization_bins(16), 4u);
    EXPECT_EQ(discretization_bins(500), 5u);
}

TEST(FeatureWeights, UniformAndCorrelation) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> rows;
    std::vector<double> e;
    for (int i = 0; i < 40; ++i) {
        const double effort = 10 + 90 * u(gen);
        rows.push_back({effort, u(gen)});
        e.push_back(effort);
    }
    auto d = normalize_minmax(make_dataset(rows, e)).data;
    EXPECT_EQ(feature_weights(d, WeightScheme::uniform, Discretization::none), (std::vector<double>{1, 1}));
    auto w = feature_weights(d, WeightScheme::pearson_correlation, Discretization::none);
    EXPECT_GT(w[0], w[1]);
    EXPECT_THROW(feature_weights(d, WeightScheme::information_gain, Discretization::none), std::invalid_argument);
    for (int s = 0; s < 8; ++s) {
        const auto scheme = static_cast<WeightScheme>(s);
        const auto disc = needs_discretization(scheme) ? Discretization::equal_frequency : Discretization::none;
        auto ws = feature_weights(d, scheme, disc, 3);
        double sum = 0;
        for (double x : ws) {
            EXPECT_GE(x, 0);
            EXPECT_TRUE(std::isfinite(x));
            sum += x;
        }
        EXPECT_NEAR(sum / ws.size(), 1.0, 1e-12) << kWeightNames[s];
        if (scheme != WeightScheme::uniform) EXPECT_GT(ws[0], ws[1]) << kWeightNames[s];
    }
}

TEST(Abe, Abe0MatchesBruteForceNearestNeighbor) {
    std::mt19937_64 gen(42);
    for (int rep = 0; rep < 10; ++rep) {
        auto d = testing_support::random_dataset(gen, 30 + rep * 7, 3, 30);
        auto m = abe_fit(d, AbeConfig::abe0());
        const auto raw = testing_support::rows_of(d);
        const auto table = oracle::scale_like(raw, raw);
        for (int q = 0; q < 20; ++q) {
            std::vector<double> row{double(gen() % 35), double(gen() % 35), double(gen() % 35)};
            const auto scaled = oracle::scale_like(raw, {row});
            EXPECT_DOUBLE_EQ(m.predict(row), d.effort(oracle::nearest(table, scaled[0])));
        }
    }
}

TEST(Abe, PermutingTrainingRowsKeepsPredictions) {
    std::mt19937_64 gen(43);
    auto d = testing_support::random_dataset(gen, 25, 3, 4);
    std::vector<std::size_t> perm(d.row_count());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    auto shuffled = d.subset(perm);
    const auto& space = aben_space();
    auto configs = space.enumerate_valid();
    for (std::size_t i = 0; i < configs.size(); i += 97) {
        const auto c = to_abe_config(space, configs[i]);
        auto a = abe_fit(d, c, 5), b = abe_fit(shuffled, c, 5);
        for (int q = 0; q < 5; ++q) {
            std::vector<double> row{double(gen() % 5), double(gen() % 5), double(gen() % 5)};
            EXPECT_DOUBLE_EQ(a.predict(row), b.predict(row)) << c.token();
        }
    }
}

TEST(Abe, AveragingAdaptationsStayWithinNeighborEfforts) {
    std::mt19937_64 gen(44);
    auto d = testing_support::random_dataset(gen, 30, 3, 10);
    const auto& space = aben_space();
    for (const auto& cand : space.enumerate_valid()) {
        const auto c = to_abe_config(space, cand);
        if (c.adaptation == Adaptation::second_learner_regression) continue;
        if (c.similarity == Similarity::mean_rank && gen() % 4) continue;  // keeps the run short
        auto m = abe_fit(d, c, 1);
        std::vector<double> row{double(gen() % 11), double(gen() % 11), double(gen() % 11)};
        auto nb = m.neighbors(row, m.k());
        double lo = 1e300, hi = -1e300;
        for (const auto& n : nb) {
            lo = std::min(lo, m.table().effort(n.position));
            hi = std::max(hi, m.table().effort(n.position));
        }
        const double y = m.predict(row);
        EXPECT_GE(y, lo - 1e-9) << c.token();
        EXPECT_LE(y, hi + 1e-9) << c.token();
    }
}
