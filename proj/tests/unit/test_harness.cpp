#include "efftune/harness.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

using namespace efftune;

namespace {

ExperimentPlan small_plan(std::vector<std::string> treatments) {
    ExperimentPlan p;
    p.datasets = {"kemerer"};
    p.treatments = std::move(treatments);
    p.repeats = 2;
    p.bins = 3;
    p.seed = 17;
    p.data_dir = testing_support::surrogate_dir();
    p.record_timing = false;
    p.guess_runs = 200;
    return p;
}

}  // namespace

TEST(Harness, TreatmentRoster) {
    EXPECT_EQ(treatment_names().size(), 10u);
    EXPECT_TRUE(is_tuned("CART_DE"));
    EXPECT_TRUE(is_tuned("ABEN_RD"));
    EXPECT_FALSE(is_tuned("ABE0"));
    EXPECT_FALSE(is_tuned("LP4EE"));
    EXPECT_EQ(parse_metric("sa"), Metric::sa);
    EXPECT_THROW(parse_metric("pred25"), std::invalid_argument);
}

TEST(Harness, PlanValidation) {
    auto p = small_plan({"CART"});
    EXPECT_NO_THROW(p.validate());
    p.bins = 1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan({});
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan({"SVR"});
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan({"CART"});
    p.repeats = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Harness, OneRecordPerCell) {
    auto store = run_experiment(small_plan({"ABE0", "CART"}));
    EXPECT_TRUE(store.failures.empty());
    ASSERT_EQ(store.scores.size(), 12u);
    std::set<std::tuple<std::string, std::size_t, std::size_t>> cells;
    for (const auto& s : store.scores) {
        cells.insert({s.treatment, s.repeat, s.fold});
        EXPECT_EQ(s.dataset, "kemerer");
        EXPECT_GE(s.mdmre, 0);
        EXPECT_LE(s.sa, 100);
        EXPECT_EQ(s.seconds, 0.0);
    }
    EXPECT_EQ(cells.size(), 12u);
}

TEST(Harness, DeterministicAcrossThreadCounts) {
    auto p = small_plan({"ABE0", "CART", "RF", "ATLM", "LP4EE"});
    auto a = run_experiment(p);
    p.threads = 3;
    auto b = run_experiment(p);
    EXPECT_EQ(scores_csv(a.scores), scores_csv(b.scores));
}

TEST(Harness, TreatmentsShareFoldsAndBaseline) {
    const auto d = load_clean(testing_support::surrogate_dir(), "kemerer");
    const auto p = small_plan({"CART"});
    const auto splits = plan_splits(d, p);
    ASSERT_EQ(splits.size(), 2u);
    for (const auto& rep : splits) {
        ASSERT_EQ(rep.size(), 3u);
        std::size_t total = 0;
        for (const auto& cell : rep) {
            total += cell.test.size();
            EXPECT_EQ(cell.train.size() + cell.test.size(), d.row_count());
            EXPECT_EQ(cell.build.size() + cell.validate.size(), cell.train.size());
        }
        EXPECT_EQ(total, d.row_count());
    }
    EXPECT_EQ(plan_splits(d, p)[1][2].test, splits[1][2].test);
    // Same split, same guess baseline: a perfect-score difference comes only from the learner.
    auto x = run_cell(d, splits[0][0], "ABE0", 0, 0, p);
    auto y = run_cell(d, splits[0][0], "ABE0", 0, 0, p);
    EXPECT_EQ(x.score, y.score);
}

TEST(Harness, TunedCellsLogTheirTrace) {
    const auto d = load_clean(testing_support::surrogate_dir(), "kemerer");
    auto p = small_plan({"CART_DE"});
    const auto splits = plan_splits(d, p);
    auto out = run_cell(d, splits[0][1], "CART_DE", 0, 1, p);
    EXPECT_EQ(out.trace.size(), kDefaultBudget);
    EXPECT_TRUE(run_cell(d, splits[0][1], "CART", 0, 1, p).trace.empty());
}

TEST(Harness, CellSeedsDifferPerCoordinate) {
    const auto base = cell_seed(1, "kemerer", "CART", 0, 0);
    EXPECT_NE(base, cell_seed(2, "kemerer", "CART", 0, 0));
    EXPECT_NE(base, cell_seed(1, "albrecht", "CART", 0, 0));
    EXPECT_NE(base, cell_seed(1, "kemerer", "RF", 0, 0));
    EXPECT_NE(base, cell_seed(1, "kemerer", "CART", 1, 0));
    EXPECT_NE(base, cell_seed(1, "kemerer", "CART", 0, 1));
}

TEST(Harness, StoreRoundTripAndReport) {
    auto store = run_experiment(small_plan({"ABE0", "CART", "ATLM"}));
    const auto dir = std::filesystem::temp_directory_path() / "efftune_store_test";
    std::filesystem::remove_all(dir);
    save_store(store, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
    auto back = load_store(dir);
    EXPECT_EQ(back.scores, store.scores);
    EXPECT_EQ(back.plan.treatments, store.plan.treatments);
    EXPECT_EQ(back.plan.seed, store.plan.seed);
    EXPECT_EQ(parse_scores_csv(scores_csv(store.scores)), store.scores);

    for (auto m : {Metric::mre, Metric::sa}) {
        auto a = render_report(store, "kemerer", m);
        auto b = render_report(back, "kemerer", m);
        EXPECT_EQ(a.csv, b.csv);
        EXPECT_EQ(a.table.entries.size(), 3u);
        EXPECT_EQ(a.table.entries.front().rank, 1);
        EXPECT_NE(a.text.find("kemerer"), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST(Harness, WinsCountRankOneAppearances) {
    RankTable t1, t2;
    t1.entries = {{1, "A", 0, 0, 0, 0, 0, false}, {1, "B", 0, 0, 0, 0, 0, false}, {2, "C", 0, 0, 0, 0, 0, false}};
    t2.entries = {{1, "A", 0, 0, 0, 0, 0, false}, {2, "B", 0, 0, 0, 0, 0, false}};
    auto w = summarize_wins({t1, t2});
    ASSERT_FALSE(w.empty());
    EXPECT_EQ(w[0].treatment, "A");
    EXPECT_EQ(w[0].wins, 2u);
    EXPECT_EQ(w[0].tables, 2u);
    EXPECT_NE(render_wins(w).find("A"), std::string::npos);
}

TEST(Harness, MissingDatasetIsReported) {
    auto p = small_plan({"CART"});
    p.datasets = {"no_such_dataset"};
    EXPECT_THROW(run_experiment(p), std::exception);
}
