#include "efftune/abe.hpp"
#include "efftune/baselines.hpp"
#include "efftune/cart.hpp"
#include "efftune/harness.hpp"
#include "efftune/optimizers.hpp"
#include "efftune/stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace efftune;

namespace {

Dataset synthetic(std::size_t rows, std::size_t features, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < features; ++j) names.push_back("x" + std::to_string(j));
    std::vector<double> cells(rows * features), efforts(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 1;
        for (std::size_t j = 0; j < features; ++j) s += (cells[i * features + j] = u(gen)) * static_cast<double>(j + 1);
        efforts[i] = s;
    }
    return Dataset("synthetic", names, cells, efforts);
}

const Dataset& china() {
    static const Dataset d = load_clean(std::filesystem::path(EFFTUNE_DATA_DIR) / "surrogate", "china");
    return d;
}

}  // namespace

static void BM_CartFit(benchmark::State& state) {
    const auto d = synthetic(static_cast<std::size_t>(state.range(0)), 10, 1);
    for (auto _ : state) benchmark::DoNotOptimize(cart_fit(d, CartParams{}, 1));
}
BENCHMARK(BM_CartFit)->Arg(50)->Arg(500)->Arg(2000);

static void BM_ForestFit(benchmark::State& state) {
    const auto d = synthetic(300, 10, 2);
    for (auto _ : state) benchmark::DoNotOptimize(rf_fit(d, ForestOptions{}, 1));
}
BENCHMARK(BM_ForestFit)->Unit(benchmark::kMillisecond);

static void BM_AbePredict(benchmark::State& state) {
    const auto& d = china();
    AbeConfig c;
    c.k = static_cast<int>(state.range(0));
    c.adaptation = c.k == 1 ? Adaptation::median : Adaptation::mean;
    const auto model = abe_fit(d, c);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(model.predict(d.row(i++ % d.row_count())));
}
BENCHMARK(BM_AbePredict)->Arg(1)->Arg(5);

static void BM_AbeDynamicK(benchmark::State& state) {
    const auto d = synthetic(static_cast<std::size_t>(state.range(0)), 6, 3);
    AbeConfig c;
    c.k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(abe_fit(d, c));
}
BENCHMARK(BM_AbeDynamicK)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Lp4ee(benchmark::State& state) {
    const auto d = synthetic(static_cast<std::size_t>(state.range(0)), 5, 4);
    for (auto _ : state) benchmark::DoNotOptimize(lp4ee_fit(d));
}
BENCHMARK(BM_Lp4ee)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ScottKnott(benchmark::State& state) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n(0, 1);
    std::vector<TreatmentSamples> groups;
    for (int g = 0; g < 10; ++g) {
        TreatmentSamples s{"t" + std::to_string(g), {}, 0};
        for (int k = 0; k < 60; ++k) s.scores.push_back(g / 3 + n(gen));
        groups.push_back(s);
    }
    for (auto _ : state) benchmark::DoNotOptimize(scott_knott(groups, ScottKnottOptions{}, 1));
}
BENCHMARK(BM_ScottKnott)->Unit(benchmark::kMillisecond);

static void BM_DeOnCartSpace(benchmark::State& state) {
    const auto& s = cart_space();
    for (auto _ : state) {
        Objective obj(s, [&s](const Candidate& c) {
            double v = 0;
            for (double x : s.encode(c)) v += (x - 0.4) * (x - 0.4);
            return v;
        });
        benchmark::DoNotOptimize(de_optimize(s, obj, DeParams{}, 1));
    }
}
BENCHMARK(BM_DeOnCartSpace)->Unit(benchmark::kMillisecond);

static void BM_FlashOnAbenSpace(benchmark::State& state) {
    const auto& s = aben_space();
    const auto pool = flash_pool(s, 0, 0);
    for (auto _ : state) {
        Objective obj(s, [&s](const Candidate& c) {
            double v = 0;
            for (double x : s.encode(c)) v += std::abs(x - 0.4);
            return v;
        });
        benchmark::DoNotOptimize(flash_optimize(s, obj, FlashParams{}, pool, 1));
    }
}
BENCHMARK(BM_FlashOnAbenSpace)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
