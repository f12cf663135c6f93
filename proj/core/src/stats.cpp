#include "efftune/stats.hpp"

#include "efftune/metrics.hpp"
#include "efftune/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace efftune {

double a12(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("a12: empty sample");
    double wins = 0;
    for (double x : xs) {
        for (double y : ys) {
            if (x > y) {
                wins += 1.0;
            } else if (x == y) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

bool bootstrap_significant(std::span<const double> xs, std::span<const double> ys, std::size_t resamples,
                           double confidence, std::uint64_t seed) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("bootstrap: empty sample");
    if (resamples < 100) throw std::invalid_argument("bootstrap: need at least 100 resamples");
    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    const double pooled = (mx * static_cast<double>(xs.size()) + my * static_cast<double>(ys.size())) /
                          static_cast<double>(xs.size() + ys.size());
    const double observed = std::abs(mx - my);
    const double tol = 1e-12 * std::max({1.0, std::abs(mx), std::abs(my)});

    std::vector<double> sx(xs.size()), sy(ys.size());
    std::transform(xs.begin(), xs.end(), sx.begin(), [&](double v) { return v - mx + pooled; });
    std::transform(ys.begin(), ys.end(), sy.begin(), [&](double v) { return v - my + pooled; });

    Rng rng(seed);
    std::size_t extreme = 0;
    for (std::size_t b = 0; b < resamples; ++b) {
        double a = 0, c = 0;
        for (std::size_t i = 0; i < sx.size(); ++i) a += sx[rng.below(sx.size())];
        for (std::size_t i = 0; i < sy.size(); ++i) c += sy[rng.below(sy.size())];
        const double diff = std::abs(a / static_cast<double>(sx.size()) - c / static_cast<double>(sy.size()));
        if (diff >= observed - tol) ++extreme;
    }
    const double p = static_cast<double>(extreme) / static_cast<double>(resamples);
    return p < 1.0 - confidence;
}

double expected_delta(const std::vector<std::vector<double>>& groups, std::size_t cut) {
    double total = 0, left = 0;
    std::size_t nt = 0, nl = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double s = std::accumulate(groups[g].begin(), groups[g].end(), 0.0);
        total += s;
        nt += groups[g].size();
        if (g < cut) {
            left += s;
            nl += groups[g].size();
        }
    }
    const std::size_t nr = nt - nl;
    if (nl == 0 || nr == 0) return 0.0;
    const double mu = total / static_cast<double>(nt);
    const double mu_l = left / static_cast<double>(nl);
    const double mu_r = (total - left) / static_cast<double>(nr);
    const double ls = static_cast<double>(nt);
    return static_cast<double>(nl) / ls * (mu_l - mu) * (mu_l - mu) +
           static_cast<double>(nr) / ls * (mu_r - mu) * (mu_r - mu);
}

std::size_t best_cut(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("best_cut: need at least two groups");
    std::size_t best = 1;
    double best_delta = expected_delta(groups, 1);
    for (std::size_t cut = 2; cut < groups.size(); ++cut) {
        const double d = expected_delta(groups, cut);
        if (d > best_delta) {
            best_delta = d;
            best = cut;
        }
    }
    return best;
}

namespace {

class ScottKnott {
public:
    ScottKnott(std::vector<TreatmentSamples> groups, const ScottKnottOptions& options, std::uint64_t seed)
        : groups_(std::move(groups)), options_(options), seed_(seed), ranks_(groups_.size(), 1) {}

    RankTable run() {
        std::vector<double> medians(groups_.size());
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (groups_[g].scores.empty()) throw std::invalid_argument("scott_knott: empty score list for " + groups_[g].token);
            medians[g] = median(groups_[g].scores);
        }
        std::vector<std::size_t> order(groups_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const bool lower = options_.orientation == Orientation::lower_is_better;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return lower ? medians[a] < medians[b] : medians[a] > medians[b];
        });
        std::vector<TreatmentSamples> sorted;
        for (auto i : order) sorted.push_back(std::move(groups_[i]));
        groups_ = std::move(sorted);

        if (!groups_.empty()) divide(0, groups_.size(), 1);

        RankTable table;
        table.orientation = options_.orientation;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            const auto& s = groups_[g].scores;
            RankEntry e;
            e.rank = ranks_[g];
            e.token = groups_[g].token;
            e.median = median(s);
            e.q25 = percentile(s, 25);
            e.q75 = percentile(s, 75);
            e.iqr = e.q75 - e.q25;
            e.runtime_seconds = groups_[g].runtime_seconds;
            table.entries.push_back(std::move(e));
        }
        flag_fast(table);
        return table;
    }

private:
    int divide(std::size_t lo, std::size_t hi, int rank) {
        if (hi - lo >= 2) {
            std::vector<std::vector<double>> window;
            for (std::size_t g = lo; g < hi; ++g) window.push_back(groups_[g].scores);
            const std::size_t cut = best_cut(window);
            std::vector<double> left, right;
            for (std::size_t g = 0; g < cut; ++g) left.insert(left.end(), window[g].begin(), window[g].end());
            for (std::size_t g = cut; g < window.size(); ++g) right.insert(right.end(), window[g].begin(), window[g].end());
            if (differs(left, right, lo, lo + cut, hi)) {
                const int next = divide(lo, lo + cut, rank);
                return divide(lo + cut, hi, next);
            }
        }
        for (std::size_t g = lo; g < hi; ++g) ranks_[g] = rank;
        return rank + 1;
    }

    bool differs(const std::vector<double>& left, const std::vector<double>& right, std::size_t lo,
                 std::size_t cut, std::size_t hi) const {
        const double a = a12(left, right);
        if (std::max(a, 1.0 - a) < options_.small_effect) return false;
        return bootstrap_significant(left, right, options_.resamples, options_.confidence,
                                     mix_seed({seed_, lo, cut, hi}));
    }

    void flag_fast(RankTable& table) const {
        double fastest = -1;
        for (const auto& e : table.entries) {
            if (e.rank == 1 && (fastest < 0 || e.runtime_seconds < fastest)) fastest = e.runtime_seconds;
        }
        const double limit = std::max(fastest, 1e-3) * options_.fast_factor;
        for (auto& e : table.entries) e.fast = e.rank == 1 && e.runtime_seconds <= limit;
    }

    std::vector<TreatmentSamples> groups_;
    ScottKnottOptions options_;
    std::uint64_t seed_;
    std::vector<int> ranks_;
};

}  // namespace

RankTable scott_knott(std::vector<TreatmentSamples> groups, const ScottKnottOptions& options, std::uint64_t seed) {
    return ScottKnott(std::move(groups), options, seed).run();
}

std::string quartile_glyph(double q25, double med, double q75, double lo, double hi, std::size_t width) {
    if (med < lo || med > hi) return "(out of range)";
    std::string line(width, ' ');
    auto pos = [&](double v) {
        const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
        return std::min(width - 1, static_cast<std::size_t>(std::lround(t * static_cast<double>(width - 1))));
    };
    for (std::size_t i = pos(q25); i <= pos(q75); ++i) line[i] = '-';
    line[width / 2] = '|';
    line[pos(med)] = '*';
    return "[" + line + "]";
}

std::string render_rank_table(const RankTable& table, const std::string& title, double lo, double hi) {
    std::size_t name_width = 6;
    for (const auto& e : table.entries) name_width = std::max(name_width, e.token.size());
    std::string out;
    if (!title.empty()) out += title + "\n";
    out += fmt::format("{:>4}  {:<{}}  {:>8}  {:>8}  {}\n", "rank", "method", name_width, "med", "iqr", "");
    for (const auto& e : table.entries) {
        out += fmt::format("{:>4}{} {:<{}}  {:>8.1f}  {:>8.1f}  {}\n", e.rank, e.fast ? "*" : " ", e.token,
                           name_width, e.median, e.iqr, quartile_glyph(e.q25, e.median, e.q75, lo, hi));
    }
    out += "(* after the rank marks the fastest rank-1 treatments)\n";
    return out;
}

std::string rank_table_csv(const RankTable& table) {
    std::string out = fmt::format("# orientation={}\n",
                                  table.orientation == Orientation::lower_is_better ? "lower" : "higher");
    out += "rank,treatment,median,iqr,q25,q75,runtime_seconds,fast\n";
    for (const auto& e : table.entries) {
        out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", e.rank, e.token, e.median, e.iqr,
                           e.q25, e.q75, e.runtime_seconds, e.fast ? 1 : 0);
    }
    return out;
}

RankTable parse_rank_table_csv(const std::string& text) {
    RankTable table;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# orientation=", 0) == 0) {
            table.orientation = line.substr(14) == "higher" ? Orientation::higher_is_better : Orientation::lower_is_better;
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw std::invalid_argument("rank table row has " + std::to_string(f.size()) + " fields");
        RankEntry e;
        e.rank = std::stoi(f[0]);
        e.token = f[1];
        e.median = std::stod(f[2]);
        e.iqr = std::stod(f[3]);
        e.q25 = std::stod(f[4]);
        e.q75 = std::stod(f[5]);
        e.runtime_seconds = std::stod(f[6]);
        e.fast = f[7] == "1";
        table.entries.push_back(std::move(e));
    }
    return table;
}

}  // namespace efftune
