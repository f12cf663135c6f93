#include "efftune/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace efftune;

TEST(Mre, Examples) {
    EXPECT_DOUBLE_EQ(mre(100, 150), 0.5);
    EXPECT_DOUBLE_EQ(mre(42, 42), 0.0);
    EXPECT_DOUBLE_EQ(mre(100, 0), 1.0);
    EXPECT_THROW(mre(0, 1), std::domain_error);
}

TEST(Mae, Examples) {
    std::vector<double> a{10, 20}, same{10, 20}, swapped{20, 10};
    EXPECT_DOUBLE_EQ(mae(a, same), 0);
    EXPECT_DOUBLE_EQ(mae(a, swapped), 10);
    std::vector<double> one{3}, other{7.5};
    EXPECT_DOUBLE_EQ(mae(one, other), 4.5);
    std::vector<double> empty;
    EXPECT_THROW(mae(empty, empty), std::invalid_argument);
    EXPECT_THROW(mae(a, one), std::invalid_argument);
}

TEST(Sa, Examples) {
    EXPECT_DOUBLE_EQ(sa(5, 5), 0);
    EXPECT_DOUBLE_EQ(sa(0, 5), 100);
    EXPECT_NEAR(sa(2.07 * 13, 13), -107, 1e-9);
    EXPECT_THROW(sa(1, 0), std::domain_error);
}

TEST(Sa, ScaleInvariant) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(1, 500);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(12), p(12), g(12);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(gen);
            p[i] = u(gen);
            g[i] = u(gen);
        }
        const double base = sa(mae(a, p), mae(a, g));
        const double c = 0.01 + u(gen);
        for (auto* v : {&a, &p, &g}) {
            for (double& x : *v) x *= c;
        }
        EXPECT_NEAR(sa(mae(a, p), mae(a, g)), base, 1e-9 * std::max(1.0, std::abs(base)));
    }
}

TEST(MedianMre, SkipsNonPositiveActualsAndIgnoresOrder) {
    std::vector<double> a{100, 0, 50, 10}, p{150, 3, 50, 12};
    EXPECT_DOUBLE_EQ(median_mre(a, p), 0.2);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(1, 100);
    std::vector<double> xs(15), ys(15);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = u(gen);
        ys[i] = u(gen);
    }
    const double base = median_mre(xs, ys);
    std::vector<std::size_t> perm(xs.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (int rep = 0; rep < 20; ++rep) {
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> px, py;
        for (auto i : perm) {
            px.push_back(xs[i]);
            py.push_back(ys[i]);
        }
        EXPECT_EQ(median_mre(px, py), base);
    }
    std::vector<double> zeros{0, 0}, any{1, 2};
    EXPECT_TRUE(std::isnan(median_mre(zeros, any)));
}

TEST(Percentile, LinearInterpolation) {
    std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(median(v), 2.5);
    EXPECT_DOUBLE_EQ(percentile(v, 0), 1);
    EXPECT_DOUBLE_EQ(percentile(v, 100), 4);
    EXPECT_DOUBLE_EQ(percentile(v, 25), 1.75);
    EXPECT_DOUBLE_EQ(iqr(v), 1.5);
    EXPECT_THROW(percentile({}, 50), std::invalid_argument);
}
