#pragma once

#include "efftune/dataset.hpp"
#include "efftune/metrics.hpp"
#include "efftune/optimizers.hpp"
#include "efftune/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace efftune {

/// Every treatment the harness knows, in report order.
const std::vector<std::string>& treatment_names();
bool is_tuned(const std::string& treatment);

enum class Metric { mre, sa };
const char* to_string(Metric m);
Metric parse_metric(const std::string& text);

struct ExperimentPlan {
    std::vector<std::string> datasets;
    std::vector<std::string> treatments;
    std::size_t repeats = 20;
    std::size_t bins = 3;
    std::uint64_t seed = 1;
    std::filesystem::path data_dir;
    std::size_t threads = 1;
    /// Record 0 seconds so that score files compare byte for byte.
    bool record_timing = true;
    /// Budgets; the defaults spend 220 evaluations per tuned fold.
    std::size_t rd_evals = kDefaultBudget;
    DeParams de;
    FlashParams flash;
    std::size_t guess_runs = 1000;

    /// Throws std::invalid_argument describing the first problem.
    void validate() const;
};

struct CellFailure {
    std::string treatment;
    std::string dataset;
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::string message;
};

struct CellTrace {
    std::string treatment;
    std::string dataset;
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::vector<TraceRow> rows;
};

struct ResultStore {
    ExperimentPlan plan;
    std::vector<FoldScore> scores;
    std::vector<CellFailure> failures;
    std::vector<CellTrace> traces;
};

/// Rows of one cross-validation cell, as positions into the cleaned dataset.
struct CellSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    /// Tuning split of `train` (2:1), as positions into the cleaned dataset.
    std::vector<std::size_t> build;
    std::vector<std::size_t> validate;
};

/// Loads <dir>/<name>.csv and drops the columns listed in <dir>/<name>.drop if present.
Dataset load_clean(const std::filesystem::path& dir, const std::string& name);

/// The splits all treatments share for (dataset, repeat, fold).
std::vector<std::vector<CellSplit>> plan_splits(const Dataset& d, const ExperimentPlan& plan);

struct CellOutcome {
    FoldScore score;
    std::vector<TraceRow> trace;
};

/// Runs one treatment on one cell. Throws when the learner cannot be fit.
CellOutcome run_cell(const Dataset& d, const CellSplit& split, const std::string& treatment, std::size_t repeat,
                     std::size_t fold, const ExperimentPlan& plan);

/// Per-cell seed: hash(master, dataset, treatment, repeat, fold).
std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset, const std::string& treatment,
                        std::size_t repeat, std::size_t fold);

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (dataset, treatment, repeat, fold) cell. Failed cells are
/// recorded in `failures` and have no score.
ResultStore run_experiment(const ExperimentPlan& plan, const Progress& progress = {});

void save_store(const ResultStore& store, const std::filesystem::path& dir);
ResultStore load_store(const std::filesystem::path& dir);

std::string scores_csv(const std::vector<FoldScore>& scores);
std::vector<FoldScore> parse_scores_csv(const std::string& text);
std::string trace_csv(const std::vector<TraceRow>& rows);

struct Report {
    RankTable table;
    std::string text;
    std::string csv;
};

/// Scott-Knott ranking of one dataset under one metric. MRE is shown in percent.
Report render_report(const ResultStore& store, const std::string& dataset, Metric metric);

struct WinCount {
    std::string treatment;
    std::size_t wins = 0;
    std::size_t tables = 0;
};

/// Rank-1 appearances per treatment across tables, most wins first.
std::vector<WinCount> summarize_wins(const std::vector<RankTable>& tables);
std::string render_wins(const std::vector<WinCount>& wins);

}  // namespace efftune
