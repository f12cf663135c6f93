#include "efftune/harness.hpp"

#include "efftune/abe.hpp"
#include "efftune/baselines.hpp"
#include "efftune/cart.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace efftune {

namespace fs = std::filesystem;

const std::vector<std::string>& treatment_names() {
    static const std::vector<std::string> names{"ABE0", "ABEN_RD", "ABEN_DE", "CART", "CART_RD",
                                                "CART_DE", "CART_FLASH", "RF", "ATLM", "LP4EE"};
    return names;
}

bool is_tuned(const std::string& treatment) {
    return treatment.ends_with("_RD") || treatment.ends_with("_DE") || treatment.ends_with("_FLASH");
}

const char* to_string(Metric m) { return m == Metric::mre ? "mre" : "sa"; }

Metric parse_metric(const std::string& text) {
    if (text == "mre" || text == "MRE") return Metric::mre;
    if (text == "sa" || text == "SA") return Metric::sa;
    throw std::invalid_argument("unknown metric '" + text + "' (expected mre or sa)");
}

void ExperimentPlan::validate() const {
    if (datasets.empty()) throw std::invalid_argument("plan has no datasets");
    if (treatments.empty()) throw std::invalid_argument("plan has no treatments");
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    const auto& known = treatment_names();
    for (const auto& t : treatments) {
        if (std::find(known.begin(), known.end(), t) == known.end()) {
            throw std::invalid_argument("unknown treatment '" + t + "'");
        }
    }
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset, const std::string& treatment,
                        std::size_t repeat, std::size_t fold) {
    return mix_seed({master, hash_text(dataset), hash_text(treatment), repeat, fold});
}

Dataset load_clean(const fs::path& dir, const std::string& name) {
    LoadOptions opts;
    opts.name = name;
    auto d = load_csv(dir / (name + ".csv"), opts);
    const auto drop = dir / (name + ".drop");
    if (fs::exists(drop)) d = clean(d, load_drop_list(drop));
    return d;
}

std::vector<std::vector<CellSplit>> plan_splits(const Dataset& d, const ExperimentPlan& plan) {
    const auto data_key = hash_text(d.name());
    const auto folds = make_folds(d, plan.repeats, plan.bins, mix_seed({plan.seed, data_key}));
    std::vector<std::vector<CellSplit>> out(plan.repeats);
    for (std::size_t r = 0; r < plan.repeats; ++r) {
        for (std::size_t b = 0; b < plan.bins; ++b) {
            CellSplit s;
            s.train = folds[r].train_positions(b);
            s.test = folds[r].test_positions(b);
            auto inner = s.train;
            Rng rng(mix_seed({plan.seed, data_key, r, b, hash_text("inner")}));
            rng.shuffle(inner);
            const std::size_t build = (2 * inner.size() + 2) / 3;
            s.build.assign(inner.begin(), inner.begin() + static_cast<std::ptrdiff_t>(build));
            s.validate.assign(inner.begin() + static_cast<std::ptrdiff_t>(build), inner.end());
            std::sort(s.build.begin(), s.build.end());
            std::sort(s.validate.begin(), s.validate.end());
            out[r].push_back(std::move(s));
        }
    }
    return out;
}

namespace {

using Predictor = std::function<double(std::span<const double>)>;
using Learner = std::function<Predictor(const Dataset&, std::uint64_t)>;

std::vector<double> predict_all(const Predictor& p, const Dataset& d) {
    std::vector<double> out(d.row_count());
    for (std::size_t i = 0; i < d.row_count(); ++i) out[i] = p(d.row(i));
    return out;
}

Learner abe_learner(const AbeConfig& config) {
    return [config](const Dataset& train, std::uint64_t seed) -> Predictor {
        auto m = std::make_shared<AbeModel>(abe_fit(train, config, seed));
        return [m](std::span<const double> row) { return m->predict(row); };
    };
}

Learner cart_learner(const CartParams& params) {
    return [params](const Dataset& train, std::uint64_t seed) -> Predictor {
        auto m = std::make_shared<TreeModel>(cart_fit(train, params, seed));
        return [m](std::span<const double> row) { return m->predict(row); };
    };
}

Learner untuned_learner(const std::string& treatment) {
    if (treatment == "ABE0") return abe_learner(AbeConfig::abe0());
    if (treatment == "CART") return cart_learner(CartParams{});
    if (treatment == "RF") {
        return [](const Dataset& train, std::uint64_t seed) -> Predictor {
            auto m = std::make_shared<ForestModel>(rf_fit(train, ForestOptions{}, seed));
            return [m](std::span<const double> row) { return m->predict(row); };
        };
    }
    if (treatment == "ATLM") {
        return [](const Dataset& train, std::uint64_t) -> Predictor {
            auto m = std::make_shared<AtlmModel>(atlm_fit(train, train.categorical_mask()));
            return [m](std::span<const double> row) { return m->predict(row); };
        };
    }
    if (treatment == "LP4EE") {
        return [](const Dataset& train, std::uint64_t) -> Predictor {
            auto m = std::make_shared<Lp4eeModel>(lp4ee_fit(train));
            return [m](std::span<const double> row) { return m->predict(row); };
        };
    }
    throw std::invalid_argument("unknown treatment '" + treatment + "'");
}

// Median MRE on the validation rows; candidates that cannot be fit score +inf.
double validation_score(const Learner& learner, const Dataset& build, const Dataset& validate, std::uint64_t seed) {
    try {
        const auto p = learner(build, seed);
        return median_mre(validate.efforts(), predict_all(p, validate));
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

struct Tuned {
    Learner learner;
    std::vector<TraceRow> trace;
};

Tuned tune(const std::string& treatment, const Dataset& build, const Dataset& validate, const ExperimentPlan& plan,
           std::uint64_t seed) {
    const auto bar = treatment.find('_');
    const auto family = treatment.substr(0, bar);
    const auto optimizer = treatment.substr(bar + 1);
    const bool abe = family == "ABEN";
    const ConfigSpace& space = abe ? aben_space() : cart_space();
    auto learner_for = [&](const Candidate& c) {
        return abe ? abe_learner(to_abe_config(space, c)) : cart_learner(to_cart_params(space, c));
    };
    Objective obj(space, [&](const Candidate& c) { return validation_score(learner_for(c), build, validate, seed); });
    TuneResult r;
    if (optimizer == "RD") {
        r = random_search(space, obj, plan.rd_evals, seed);
    } else if (optimizer == "DE") {
        r = de_optimize(space, obj, plan.de, seed);
    } else if (optimizer == "FLASH") {
        r = flash_optimize(space, obj, plan.flash, seed);
    } else {
        throw std::invalid_argument("unknown optimizer in '" + treatment + "'");
    }
    return {learner_for(r.best), obj.trace()};
}

}  // namespace

CellOutcome run_cell(const Dataset& d, const CellSplit& split, const std::string& treatment, std::size_t repeat,
                     std::size_t fold, const ExperimentPlan& plan) {
    const auto seed = cell_seed(plan.seed, d.name(), treatment, repeat, fold);
    const auto start = std::chrono::steady_clock::now();
    const auto train = d.subset(split.train);
    const auto test = d.subset(split.test);

    CellOutcome out;
    Learner learner;
    if (is_tuned(treatment)) {
        auto t = tune(treatment, d.subset(split.build), d.subset(split.validate), plan, seed);
        learner = std::move(t.learner);
        out.trace = std::move(t.trace);
    } else {
        learner = untuned_learner(treatment);
    }
    const auto predictions = predict_all(learner(train, seed), test);
    for (double p : predictions) {
        if (!std::isfinite(p)) throw std::runtime_error(treatment + " produced a non-finite prediction");
    }
    // The guess baseline depends only on the cell, so every treatment faces the same one.
    const auto guess_seed = mix_seed({plan.seed, hash_text(d.name()), repeat, fold, hash_text("guess")});
    const double guess = random_guess_mae(train.efforts(), test.efforts(), plan.guess_runs, guess_seed);

    auto& s = out.score;
    s.treatment = treatment;
    s.dataset = d.name();
    s.repeat = repeat;
    s.fold = fold;
    s.mdmre = median_mre(test.efforts(), predictions);
    s.sa = sa(mae(test.efforts(), predictions), guess);
    if (plan.record_timing) {
        s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return out;
}

ResultStore run_experiment(const ExperimentPlan& plan, const Progress& progress) {
    plan.validate();
    struct Job {
        std::size_t dataset, treatment, repeat, fold;
    };
    std::vector<Dataset> data;
    std::vector<std::vector<std::vector<CellSplit>>> splits;
    for (const auto& name : plan.datasets) {
        data.push_back(load_clean(plan.data_dir, name));
        splits.push_back(plan_splits(data.back(), plan));
    }
    std::vector<Job> jobs;
    for (std::size_t di = 0; di < data.size(); ++di) {
        for (std::size_t ti = 0; ti < plan.treatments.size(); ++ti) {
            for (std::size_t r = 0; r < plan.repeats; ++r) {
                for (std::size_t f = 0; f < plan.bins; ++f) jobs.push_back({di, ti, r, f});
            }
        }
    }

    // Slot-indexed results keep the output independent of scheduling.
    std::vector<std::optional<CellOutcome>> outcomes(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto& job = jobs[j];
            try {
                outcomes[j] = run_cell(data[job.dataset], splits[job.dataset][job.repeat][job.fold],
                                       plan.treatments[job.treatment], job.repeat, job.fold, plan);
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
            const auto n = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(n, jobs.size());
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(plan.threads, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ResultStore store;
    store.plan = plan;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& job = jobs[j];
        if (!outcomes[j]) {
            store.failures.push_back({plan.treatments[job.treatment], data[job.dataset].name(), job.repeat, job.fold,
                                      errors[j]});
            continue;
        }
        auto& o = *outcomes[j];
        if (!o.trace.empty()) {
            store.traces.push_back({o.score.treatment, o.score.dataset, job.repeat, job.fold, std::move(o.trace)});
        }
        store.scores.push_back(std::move(o.score));
    }
    return store;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// Failure messages may hold commas or newlines; keep the CSV one line per record.
std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += "\"\"";
        else if (ch == '\n' || ch == '\r') q += ' ';
        else q += ch;
    }
    return q + "\"";
}

nlohmann::json plan_json(const ExperimentPlan& p) {
    nlohmann::json j;
    j["datasets"] = p.datasets;
    j["treatments"] = p.treatments;
    j["repeats"] = p.repeats;
    j["bins"] = p.bins;
    j["seed"] = p.seed;
    j["data_dir"] = p.data_dir.string();
    j["record_timing"] = p.record_timing;
    j["rd_evals"] = p.rd_evals;
    j["de"] = {{"np", p.de.np}, {"f", p.de.f}, {"cr", p.de.cr}, {"gen", p.de.gen}};
    j["flash"] = {{"budget", p.flash.budget}, {"initial", p.flash.initial}, {"pool", p.flash.pool}};
    j["guess_runs"] = p.guess_runs;
    nlohmann::json seeds = nlohmann::json::object();
    for (const auto& d : p.datasets) seeds[d] = mix_seed({p.seed, hash_text(d)});
    j["fold_seeds"] = seeds;
    j["version"] = "efftune 1.0";
    return j;
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
    ExperimentPlan p;
    p.datasets = j.at("datasets").get<std::vector<std::string>>();
    p.treatments = j.at("treatments").get<std::vector<std::string>>();
    p.repeats = j.at("repeats").get<std::size_t>();
    p.bins = j.at("bins").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.data_dir = j.at("data_dir").get<std::string>();
    p.record_timing = j.value("record_timing", true);
    p.rd_evals = j.value("rd_evals", kDefaultBudget);
    if (j.contains("de")) {
        const auto& de = j["de"];
        p.de = {de.at("np").get<std::size_t>(), de.at("f").get<double>(), de.at("cr").get<double>(),
                de.at("gen").get<std::size_t>()};
    }
    if (j.contains("flash")) {
        const auto& fl = j["flash"];
        p.flash = {fl.at("budget").get<std::size_t>(), fl.at("initial").get<std::size_t>(),
                   fl.at("pool").get<std::size_t>()};
    }
    p.guess_runs = j.value("guess_runs", std::size_t{1000});
    return p;
}

}  // namespace

std::string scores_csv(const std::vector<FoldScore>& scores) {
    std::string out = "treatment,dataset,repeat,fold,mdmre,sa,seconds\n";
    for (const auto& s : scores) {
        out += fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g}\n", s.treatment, s.dataset, s.repeat, s.fold, s.mdmre,
                           s.sa, s.seconds);
    }
    return out;
}

std::vector<FoldScore> parse_scores_csv(const std::string& text) {
    std::vector<FoldScore> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 7) throw std::invalid_argument("score row has " + std::to_string(f.size()) + " fields");
        FoldScore s;
        s.treatment = f[0];
        s.dataset = f[1];
        s.repeat = std::stoul(f[2]);
        s.fold = std::stoul(f[3]);
        s.mdmre = std::stod(f[4]);
        s.sa = std::stod(f[5]);
        s.seconds = std::stod(f[6]);
        out.push_back(std::move(s));
    }
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "index,candidate,score\n";
    for (const auto& r : rows) out += fmt::format("{},{},{:.17g}\n", r.index, r.token, r.score);
    return out;
}

void save_store(const ResultStore& store, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "manifest.json", plan_json(store.plan).dump(2) + "\n");
    write_text(dir / "scores.csv", scores_csv(store.scores));
    std::string failures = "treatment,dataset,repeat,fold,message\n";
    for (const auto& f : store.failures) {
        failures += fmt::format("{},{},{},{},{}\n", f.treatment, f.dataset, f.repeat, f.fold, csv_quote(f.message));
    }
    write_text(dir / "failures.csv", failures);
    for (const auto& t : store.traces) {
        const auto sub = dir / "traces" / t.dataset;
        fs::create_directories(sub);
        write_text(sub / fmt::format("{}_r{}_f{}.csv", t.treatment, t.repeat, t.fold), trace_csv(t.rows));
    }
}

ResultStore load_store(const fs::path& dir) {
    ResultStore store;
    store.plan = plan_from_json(nlohmann::json::parse(read_text(dir / "manifest.json")));
    store.scores = parse_scores_csv(read_text(dir / "scores.csv"));
    if (fs::exists(dir / "failures.csv")) {
        std::istringstream in(read_text(dir / "failures.csv"));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto f = split_csv_line(line);
            if (f.size() < 5) continue;
            CellFailure cf{f[0], f[1], std::stoul(f[2]), std::stoul(f[3]), ""};
            for (std::size_t i = 4; i < f.size(); ++i) cf.message += (i > 4 ? "," : "") + f[i];
            store.failures.push_back(std::move(cf));
        }
    }
    return store;
}

Report render_report(const ResultStore& store, const std::string& dataset, Metric metric) {
    std::map<std::string, TreatmentSamples> by_treatment;
    for (const auto& s : store.scores) {
        if (s.dataset != dataset) continue;
        auto& g = by_treatment[s.treatment];
        g.token = s.treatment;
        g.runtime_seconds += s.seconds;
        const double v = metric == Metric::mre ? s.mdmre * 100.0 : s.sa;
        if (std::isfinite(v)) g.scores.push_back(v);
    }
    if (by_treatment.empty()) throw std::invalid_argument("no records for dataset '" + dataset + "'");

    // Known treatments in their canonical order, anything else alphabetically after.
    std::vector<TreatmentSamples> groups;
    for (const auto& t : treatment_names()) {
        auto it = by_treatment.find(t);
        if (it == by_treatment.end()) continue;
        if (!it->second.scores.empty()) groups.push_back(std::move(it->second));
        by_treatment.erase(it);
    }
    for (auto& [name, g] : by_treatment) {
        if (!g.scores.empty()) groups.push_back(std::move(g));
    }
    if (groups.empty()) throw std::invalid_argument("no finite scores for dataset '" + dataset + "'");

    ScottKnottOptions opts;
    opts.orientation = metric == Metric::mre ? Orientation::lower_is_better : Orientation::higher_is_better;
    Report r;
    r.table = scott_knott(std::move(groups), opts, mix_seed({store.plan.seed, hash_text(dataset), hash_text(to_string(metric))}));
    r.text = render_rank_table(r.table, fmt::format("{} ({})", dataset, metric == Metric::mre ? "MRE %" : "SA %"));
    r.csv = rank_table_csv(r.table);
    return r;
}

std::vector<WinCount> summarize_wins(const std::vector<RankTable>& tables) {
    std::map<std::string, std::size_t> wins;
    for (const auto& t : tables) {
        for (const auto& e : t.entries) {
            auto& w = wins[e.token];
            if (e.rank == 1) ++w;
        }
    }
    std::vector<WinCount> out;
    for (const auto& [name, n] : wins) out.push_back({name, n, tables.size()});
    std::stable_sort(out.begin(), out.end(), [](const WinCount& a, const WinCount& b) { return a.wins > b.wins; });
    return out;
}

std::string render_wins(const std::vector<WinCount>& wins) {
    std::size_t width = 9;
    for (const auto& w : wins) width = std::max(width, w.treatment.size());
    std::string out = fmt::format("{:<{}}  wins\n", "treatment", width);
    for (const auto& w : wins) out += fmt::format("{:<{}}  {}/{}\n", w.treatment, width, w.wins, w.tables);
    return out;
}

}  // namespace efftune
