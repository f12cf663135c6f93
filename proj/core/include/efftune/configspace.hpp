#pragma once

#include "efftune/abe.hpp"
#include "efftune/cart.hpp"
#include "efftune/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace efftune {

enum class ParamKind { continuous, integer, categorical };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::categorical;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::string> choices;
    /// Feature-model optional feature: its first choice is the "off" state.
    bool optional = false;

    /// Two-choice categoricals flip instead of extrapolating under DE.
    bool is_boolean() const { return kind == ParamKind::categorical && choices.size() == 2; }
    /// Number of distinct values; 0 for continuous.
    std::size_t cardinality() const;
};

/// Cross-tree rule: when `if_param` takes a value in `if_in`, `then_param`
/// must take a value in `then_in`. Violations are repaired to `repair`.
struct Rule {
    std::string if_param;
    std::vector<std::string> if_in;
    std::string then_param;
    std::vector<std::string> then_in;
    std::string repair;
};

/// One assignment. Continuous and integer params hold their value,
/// categoricals hold the choice index.
struct Candidate {
    std::vector<double> values;
    bool operator==(const Candidate&) const = default;
};

class ConfigSpace {
public:
    ConfigSpace() = default;
    ConfigSpace(std::string name, std::vector<ParamSpec> params, std::vector<Rule> rules);

    const std::string& name() const { return name_; }
    const std::vector<ParamSpec>& params() const { return params_; }
    const std::vector<Rule>& rules() const { return rules_; }
    std::size_t size() const { return params_.size(); }
    std::size_t index_of(std::string_view param) const;

    /// True when no parameter is continuous, so the space can be enumerated.
    bool finite() const;
    /// Size of the unconstrained cross-product. Throws for continuous spaces.
    std::uint64_t raw_cardinality() const;

    bool in_range(const Candidate& c) const;
    bool valid(const Candidate& c) const;
    /// Applies rule repairs until every rule holds.
    Candidate repair(Candidate c) const;

    /// Canonical text: categoricals by choice name, numbers as name=value, '|'-joined.
    std::string token(const Candidate& c) const;
    std::string_view choice(const Candidate& c, std::string_view param) const;
    double value(const Candidate& c, std::string_view param) const;

    std::vector<double> encode(const Candidate& c) const;
    /// Clamps to [0,1], decodes, then repairs.
    Candidate decode(std::span<const double> v) const;

    /// Uniform over the raw cross-product.
    Candidate sample_raw(Rng& rng) const;
    /// Rejection sampling; throws after 10,000 invalid draws.
    Candidate sample_valid(Rng& rng) const;
    Candidate sample_valid(std::uint64_t seed) const;

    std::vector<Candidate> enumerate_raw() const;
    std::vector<Candidate> enumerate_valid() const;

private:
    bool rule_holds(std::size_t rule, const Candidate& c) const;

    std::string name_;
    std::vector<ParamSpec> params_;
    std::vector<Rule> rules_;
    struct ResolvedRule {
        std::size_t if_param;
        std::vector<std::size_t> if_in;
        std::size_t then_param;
        std::vector<std::size_t> then_in;
        std::size_t repair;
    };
    std::vector<ResolvedRule> resolved_;
};

/// Parses a feature-model manifest:
///
///     mandatory similarity: wEuclid uEuclid maxDist
///     optional weighting: uniform pearson relief
///     continuous max_features 0.01 1
///     integer max_depth 1 12
///     rule weighting in infoGain,chi2 requires discretization in eqfreq,eqwidth repair eqfreq
///
/// '#' starts a comment.
ConfigSpace parse_space(std::string_view text, std::string name);
ConfigSpace load_space(const std::filesystem::path& path);

/// Text of the built-in manifests.
std::string_view aben_manifest();
std::string_view cart_manifest();

const ConfigSpace& aben_space();
const ConfigSpace& cart_space();

AbeConfig to_abe_config(const ConfigSpace& space, const Candidate& c);
Candidate from_abe_config(const ConfigSpace& space, const AbeConfig& config);
CartParams to_cart_params(const ConfigSpace& space, const Candidate& c);

}  // namespace efftune
