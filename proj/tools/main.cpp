// efftune: run tuning experiments, rank treatments, export design spaces.

#include "efftune/configspace.hpp"
#include "efftune/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace efftune;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> resolve_datasets(const std::string& arg, const fs::path& dir) {
    if (arg != "all") return split_list(arg);
    std::vector<std::string> out;
    for (const auto& e : dataset_roster()) {
        if (fs::exists(dir / (e.name + ".csv"))) out.push_back(e.name);
    }
    if (out.empty()) throw std::runtime_error("no known dataset files in " + dir.string());
    return out;
}

int cmd_run(const ExperimentPlan& base, const std::string& datasets, const std::string& treatments,
            const fs::path& out, bool quiet) {
    ExperimentPlan plan = base;
    plan.datasets = resolve_datasets(datasets, plan.data_dir);
    plan.treatments = treatments == "all" ? treatment_names() : split_list(treatments);
    std::size_t last = 0;
    auto progress = [&](std::size_t done, std::size_t total) {
        if (quiet) return;
        const std::size_t pct = done * 100 / total;
        if (pct != last || done == total) {
            last = pct;
            std::cerr << fmt::format("\r{}/{} cells ({}%)", done, total, pct) << std::flush;
        }
    };
    const auto store = run_experiment(plan, progress);
    if (!quiet) std::cerr << "\n";
    save_store(store, out);
    std::cout << fmt::format("{} scores, {} failures written to {}\n", store.scores.size(), store.failures.size(),
                             out.string());
    for (const auto& f : store.failures) {
        std::cerr << fmt::format("failed: {} {} r{} f{}: {}\n", f.treatment, f.dataset, f.repeat, f.fold, f.message);
    }
    return store.failures.empty() ? 0 : 3;
}

int cmd_report(const fs::path& dir, const std::string& dataset, const std::string& metric) {
    const auto store = load_store(dir);
    const auto datasets = dataset == "all" ? store.plan.datasets : split_list(dataset);
    const std::vector<Metric> metrics =
        metric == "all" ? std::vector<Metric>{Metric::mre, Metric::sa} : std::vector<Metric>{parse_metric(metric)};
    fs::create_directories(dir / "reports");
    for (const auto& d : datasets) {
        for (auto m : metrics) {
            const auto r = render_report(store, d, m);
            std::cout << r.text << "\n";
            std::ofstream(dir / "reports" / fmt::format("{}_{}.csv", d, to_string(m))) << r.csv;
        }
    }
    return 0;
}

int cmd_wins(const fs::path& dir) {
    const auto store = load_store(dir);
    std::vector<RankTable> tables;
    for (const auto& d : store.plan.datasets) {
        for (auto m : {Metric::mre, Metric::sa}) tables.push_back(render_report(store, d, m).table);
    }
    std::cout << render_wins(summarize_wins(tables));
    return 0;
}

int cmd_configs(const std::string& which, bool raw, const std::string& out) {
    const ConfigSpace space = which == "aben" ? aben_space() : which == "cart" ? cart_space() : load_space(which);
    if (!space.finite()) throw std::runtime_error("space '" + space.name() + "' has continuous parameters");
    const auto points = raw ? space.enumerate_raw() : space.enumerate_valid();
    std::ostringstream text;
    text << fmt::format("# {} {} configurations of space {} (raw cross-product {})\n", points.size(),
                        raw ? "raw" : "valid", space.name(), space.raw_cardinality());
    for (const auto& c : points) text << space.token(c) << "\n";
    if (out.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream(out) << text.str();
        std::cout << fmt::format("{} configurations written to {}\n", points.size(), out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tune and benchmark software effort estimators"};
    app.require_subcommand(1);

    ExperimentPlan plan;
    plan.threads = std::max(1u, std::thread::hardware_concurrency());
    std::string datasets = "all", treatments = "all", data_dir = "data/surrogate", out = "results";
    bool quick = false, no_timing = false, quiet = false;
    auto* run = app.add_subcommand("run", "Run M x N cross-validation for every dataset and treatment");
    run->add_option("--data", data_dir, "Directory holding <name>.csv and optional <name>.drop files");
    run->add_option("--datasets", datasets, "Comma-separated dataset names, or 'all'");
    run->add_option("--treatments", treatments, "Comma-separated treatments, or 'all'");
    run->add_option("--repeats", plan.repeats, "Repeats M")->check(CLI::PositiveNumber);
    run->add_option("--bins", plan.bins, "Bins N")->check(CLI::Range(2, 1000));
    run->add_option("--seed", plan.seed, "Master seed");
    run->add_option("--out", out, "Output directory");
    run->add_option("--threads", plan.threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--quick", quick, "Three repeats, for smoke runs");
    run->add_flag("--no-timing", no_timing, "Record 0 seconds so score files are byte-reproducible");
    run->add_flag("-q,--quiet", quiet, "No progress output");

    std::string store_dir, report_dataset = "all", metric = "all";
    auto* report = app.add_subcommand("report", "Rank the treatments of one dataset");
    report->add_option("--store", store_dir, "Result directory written by run")->required();
    report->add_option("--dataset", report_dataset, "Dataset name(s), or 'all'");
    report->add_option("--metric", metric, "mre, sa or all");

    auto* wins = app.add_subcommand("wins", "Count rank-1 finishes across datasets and metrics");
    wins->add_option("--store", store_dir, "Result directory written by run")->required();

    std::string space = "aben", configs_out;
    bool raw = false;
    auto* configs = app.add_subcommand("configs", "List the configurations of a design space");
    configs->add_option("--space", space, "aben, cart, or a manifest path");
    configs->add_flag("--raw", raw, "Include points that break cross-tree rules");
    configs->add_option("--out", configs_out, "Write to this file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            plan.data_dir = data_dir;
            plan.record_timing = !no_timing;
            if (quick) plan.repeats = 3;
            return cmd_run(plan, datasets, treatments, out, quiet);
        }
        if (*report) return cmd_report(store_dir, report_dataset, metric);
        if (*wins) return cmd_wins(store_dir);
        if (*configs) return cmd_configs(space, raw, configs_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
