#pragma once

#include "efftune/configspace.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace efftune {

struct TraceRow {
    std::size_t index = 0;  // 1-based order of true evaluations
    std::string token;
    double score = 0.0;
};

/// Scored black box over a space. Lower is better.
///
/// Results are cached by canonical token; only uncached queries reach the
/// wrapped function and count as evaluations.
class Objective {
public:
    using Fn = std::function<double(const Candidate&)>;

    Objective(const ConfigSpace& space, Fn fn) : space_(&space), fn_(std::move(fn)) {}

    double operator()(const Candidate& c);
    bool seen(const Candidate& c) const { return cache_.count(space_->token(c)) != 0; }
    std::size_t evaluations() const { return trace_.size(); }
    const std::vector<TraceRow>& trace() const { return trace_; }
    const ConfigSpace& space() const { return *space_; }

private:
    const ConfigSpace* space_;
    Fn fn_;
    std::unordered_map<std::string, double> cache_;
    std::vector<TraceRow> trace_;
};

struct TuneResult {
    Candidate best;
    double best_score = 0.0;
    /// Best score so far: after each evaluation (RD, FLASH) or each generation (DE, initial population first).
    std::vector<double> history;
};

/// Draws `evals` distinct valid candidates and keeps the best (earliest on ties).
TuneResult random_search(const ConfigSpace& space, Objective& obj, std::size_t evals, std::uint64_t seed);
inline constexpr std::size_t kDefaultBudget = 220;

struct DeParams {
    std::size_t np = 20;
    double f = 0.75;
    double cr = 0.3;
    std::size_t gen = 10;
};

/// Mutant coordinate a + f (b - c), clamped to [0, 1].
double de_mutate(double a, double b, double c, double f);

/// DE/rand/1/bin on [0,1] encodings. Two-choice parameters flip when mutated.
/// Trials that repeat an evaluated point are redrawn, so every step costs one
/// true evaluation: np + np * gen in total.
TuneResult de_optimize(const ConfigSpace& space, Objective& obj, const DeParams& params, std::uint64_t seed);

struct FlashParams {
    std::size_t budget = 200;
    std::size_t initial = 20;
    /// Pool size for spaces that cannot be enumerated.
    std::size_t pool = 5000;
};

/// Candidate pool: every valid point of a finite space, otherwise `size` distinct seeded samples.
std::vector<Candidate> flash_pool(const ConfigSpace& space, std::size_t size, std::uint64_t seed);

/// Sequential model-based search: a regression tree trained on evaluated
/// encodings picks the unevaluated pool member with the best predicted score.
TuneResult flash_optimize(const ConfigSpace& space, Objective& obj, const FlashParams& params, std::uint64_t seed);
TuneResult flash_optimize(const ConfigSpace& space, Objective& obj, const FlashParams& params,
                          const std::vector<Candidate>& pool, std::uint64_t seed);

}  // namespace efftune
