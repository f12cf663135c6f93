#include "efftune/optimizers.hpp"

#include "efftune/cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace efftune {

double Objective::operator()(const Candidate& c) {
    auto t = space_->token(c);
    if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    double score = fn_(c);
    if (std::isnan(score)) score = std::numeric_limits<double>::infinity();
    cache_.emplace(t, score);
    trace_.push_back({trace_.size() + 1, std::move(t), score});
    return score;
}

namespace {

// A fresh valid candidate not yet evaluated; false when none turns up.
bool draw_unseen(const ConfigSpace& space, const Objective& obj, Rng& rng, Candidate& out) {
    constexpr std::size_t kAttempts = 10000;
    for (std::size_t i = 0; i < kAttempts; ++i) {
        auto c = space.sample_valid(rng);
        if (!obj.seen(c)) {
            out = std::move(c);
            return true;
        }
    }
    return false;
}

}  // namespace

TuneResult random_search(const ConfigSpace& space, Objective& obj, std::size_t evals, std::uint64_t seed) {
    if (evals < 1) throw std::invalid_argument("random search needs at least one evaluation");
    Rng rng(seed);
    TuneResult r;
    r.best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < evals; ++i) {
        Candidate c;
        if (!draw_unseen(space, obj, rng, c)) break;
        const double s = obj(c);
        if (r.best.values.empty() || s < r.best_score) {
            r.best = c;
            r.best_score = s;
        }
        r.history.push_back(r.best_score);
    }
    return r;
}

double de_mutate(double a, double b, double c, double f) { return std::clamp(a + f * (b - c), 0.0, 1.0); }

TuneResult de_optimize(const ConfigSpace& space, Objective& obj, const DeParams& params, std::uint64_t seed) {
    if (params.np < 4) throw std::invalid_argument("DE needs a population of at least 4");
    if (!(params.cr > 0 && params.cr <= 1)) throw std::invalid_argument("DE crossover rate must be in (0, 1]");
    if (!(params.f > 0)) throw std::invalid_argument("DE differential weight must be positive");

    Rng rng(seed);
    const std::size_t dims = space.size();
    std::vector<Candidate> pop;
    std::vector<std::vector<double>> enc;
    std::vector<double> scores;
    for (std::size_t i = 0; i < params.np; ++i) {
        Candidate c;
        if (!draw_unseen(space, obj, rng, c)) throw std::runtime_error("DE: space too small for the population");
        scores.push_back(obj(c));
        enc.push_back(space.encode(c));
        pop.push_back(std::move(c));
    }

    TuneResult r;
    auto record = [&] {
        const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
        r.best = pop[best];
        r.best_score = scores[best];
        r.history.push_back(r.best_score);
    };
    record();

    auto make_trial = [&](std::size_t target) {
        std::size_t a, b, c;
        do a = rng.below(params.np); while (a == target);
        do b = rng.below(params.np); while (b == target || b == a);
        do c = rng.below(params.np); while (c == target || c == a || c == b);
        const std::size_t forced = rng.below(dims);
        std::vector<double> y = enc[target];
        for (std::size_t k = 0; k < dims; ++k) {
            if (k != forced && !(rng.uniform() < params.cr)) continue;
            const auto& p = space.params()[k];
            if (p.is_boolean()) {
                const double other = pop[target].values[k] == 0.0 ? 1.0 : 0.0;
                y[k] = (other + 0.5) / 2.0;
            } else {
                y[k] = de_mutate(enc[a][k], enc[b][k], enc[c][k], params.f);
            }
        }
        return space.decode(y);
    };

    constexpr std::size_t kRedraws = 50;
    for (std::size_t g = 0; g < params.gen; ++g) {
        for (std::size_t i = 0; i < params.np; ++i) {
            Candidate trial = make_trial(i);
            for (std::size_t attempt = 1; attempt < kRedraws && obj.seen(trial); ++attempt) trial = make_trial(i);
            if (obj.seen(trial) && !draw_unseen(space, obj, rng, trial)) continue;
            const double s = obj(trial);
            if (s < scores[i]) {
                scores[i] = s;
                enc[i] = space.encode(trial);
                pop[i] = std::move(trial);
            }
        }
        record();
    }
    return r;
}

std::vector<Candidate> flash_pool(const ConfigSpace& space, std::size_t size, std::uint64_t seed) {
    if (space.finite()) return space.enumerate_valid();
    Rng rng(seed);
    std::vector<Candidate> pool;
    std::unordered_set<std::string> tokens;
    const std::size_t cap = size * 100;
    for (std::size_t i = 0; i < cap && pool.size() < size; ++i) {
        auto c = space.sample_valid(rng);
        if (tokens.insert(space.token(c)).second) pool.push_back(std::move(c));
    }
    return pool;
}

TuneResult flash_optimize(const ConfigSpace& space, Objective& obj, const FlashParams& params, std::uint64_t seed) {
    return flash_optimize(space, obj, params, flash_pool(space, params.pool, mix_seed({seed, 1})), seed);
}

TuneResult flash_optimize(const ConfigSpace& space, Objective& obj, const FlashParams& params,
                          const std::vector<Candidate>& pool, std::uint64_t seed) {
    if (params.initial < 2) throw std::invalid_argument("FLASH needs at least 2 initial evaluations");
    if (pool.size() < params.initial) throw std::invalid_argument("FLASH pool smaller than the initial sample");

    Rng rng(seed);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    const std::size_t dims = space.size();
    std::vector<bool> evaluated(pool.size(), false);
    std::vector<std::size_t> archive;
    std::vector<double> scores;
    TuneResult r;
    r.best_score = std::numeric_limits<double>::infinity();
    auto evaluate = [&](std::size_t idx) {
        evaluated[idx] = true;
        archive.push_back(idx);
        scores.push_back(obj(pool[idx]));
        if (r.best.values.empty() || scores.back() < r.best_score) {
            r.best = pool[idx];
            r.best_score = scores.back();
        }
        r.history.push_back(r.best_score);
    };
    for (std::size_t i = 0; i < params.initial; ++i) evaluate(order[i]);

    std::vector<std::vector<double>> encodings(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) encodings[i] = space.encode(pool[i]);

    for (std::size_t step = 0; step < params.budget && archive.size() < pool.size(); ++step) {
        // Failed evaluations train the surrogate as the worst finite score seen.
        double worst = 0;
        for (double s : scores) {
            if (std::isfinite(s)) worst = std::max(worst, s);
        }
        std::vector<double> cells;
        std::vector<double> targets;
        for (std::size_t k = 0; k < archive.size(); ++k) {
            const auto& e = encodings[archive[k]];
            cells.insert(cells.end(), e.begin(), e.end());
            targets.push_back(std::isfinite(scores[k]) ? scores[k] : worst);
        }
        const auto surrogate = cart_fit(cells, dims, targets, CartParams{}, mix_seed({seed, step}));

        std::size_t pick = pool.size();
        double best_pred = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (evaluated[i]) continue;
            const double pred = surrogate.predict(encodings[i]);
            if (pick == pool.size() || pred < best_pred) {
                pick = i;
                best_pred = pred;
            }
        }
        evaluate(pick);
    }
    return r;
}

}  // namespace efftune
