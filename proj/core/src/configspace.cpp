#include "efftune/configspace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace efftune {

namespace {

// Continuous values live on a grid of this many steps so that decode(encode(c))
// reproduces c bit for bit.
constexpr double kContinuousSteps = 1e6;
constexpr std::size_t kMaxRejections = 10000;

std::vector<std::string> split_on(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::size_t choice_index(const ParamSpec& p, const std::string& label) {
    auto it = std::find(p.choices.begin(), p.choices.end(), label);
    if (it == p.choices.end()) throw std::invalid_argument("'" + label + "' is not a choice of " + p.name);
    return static_cast<std::size_t>(it - p.choices.begin());
}

double snap_continuous(const ParamSpec& p, double unit) {
    const double steps = std::round(std::clamp(unit, 0.0, 1.0) * kContinuousSteps);
    return p.lo + steps / kContinuousSteps * (p.hi - p.lo);
}

}  // namespace

std::size_t ParamSpec::cardinality() const {
    switch (kind) {
        case ParamKind::continuous: return 0;
        case ParamKind::integer: return static_cast<std::size_t>(hi - lo) + 1;
        case ParamKind::categorical: return choices.size();
    }
    return 0;
}

ConfigSpace::ConfigSpace(std::string name, std::vector<ParamSpec> params, std::vector<Rule> rules)
    : name_(std::move(name)), params_(std::move(params)), rules_(std::move(rules)) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (params_[j].name == p.name) throw std::invalid_argument("duplicate parameter " + p.name);
        }
        if (p.kind == ParamKind::categorical && p.choices.empty()) {
            throw std::invalid_argument("parameter " + p.name + " has no choices");
        }
        if (p.kind != ParamKind::categorical && !(p.lo < p.hi)) {
            throw std::invalid_argument("parameter " + p.name + " needs lo < hi");
        }
        if (p.kind == ParamKind::integer && (p.lo != std::floor(p.lo) || p.hi != std::floor(p.hi))) {
            throw std::invalid_argument("integer parameter " + p.name + " needs integral bounds");
        }
    }
    for (const auto& r : rules_) {
        ResolvedRule rr;
        rr.if_param = index_of(r.if_param);
        rr.then_param = index_of(r.then_param);
        const auto& ip = params_[rr.if_param];
        const auto& tp = params_[rr.then_param];
        if (ip.kind != ParamKind::categorical || tp.kind != ParamKind::categorical) {
            throw std::invalid_argument("rules may only reference categorical parameters");
        }
        for (const auto& v : r.if_in) rr.if_in.push_back(choice_index(ip, v));
        for (const auto& v : r.then_in) rr.then_in.push_back(choice_index(tp, v));
        rr.repair = choice_index(tp, r.repair);
        if (std::find(rr.then_in.begin(), rr.then_in.end(), rr.repair) == rr.then_in.end()) {
            throw std::invalid_argument("rule repair value must satisfy the rule");
        }
        resolved_.push_back(std::move(rr));
    }
}

std::size_t ConfigSpace::index_of(std::string_view param) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name == param) return i;
    }
    throw std::invalid_argument("unknown parameter " + std::string(param));
}

bool ConfigSpace::finite() const {
    return std::none_of(params_.begin(), params_.end(), [](const ParamSpec& p) { return p.kind == ParamKind::continuous; });
}

std::uint64_t ConfigSpace::raw_cardinality() const {
    if (!finite()) throw std::logic_error("continuous space has no finite cardinality");
    std::uint64_t n = 1;
    for (const auto& p : params_) n *= p.cardinality();
    return n;
}

bool ConfigSpace::in_range(const Candidate& c) const {
    if (c.values.size() != params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        const double v = c.values[i];
        if (!std::isfinite(v)) return false;
        switch (p.kind) {
            case ParamKind::continuous:
                if (v < p.lo || v > p.hi) return false;
                break;
            case ParamKind::integer:
                if (v < p.lo || v > p.hi || v != std::floor(v)) return false;
                break;
            case ParamKind::categorical:
                if (v < 0 || v >= static_cast<double>(p.choices.size()) || v != std::floor(v)) return false;
                break;
        }
    }
    return true;
}

bool ConfigSpace::rule_holds(std::size_t rule, const Candidate& c) const {
    const auto& rr = resolved_[rule];
    const auto iv = static_cast<std::size_t>(c.values[rr.if_param]);
    if (std::find(rr.if_in.begin(), rr.if_in.end(), iv) == rr.if_in.end()) return true;
    const auto tv = static_cast<std::size_t>(c.values[rr.then_param]);
    return std::find(rr.then_in.begin(), rr.then_in.end(), tv) != rr.then_in.end();
}

bool ConfigSpace::valid(const Candidate& c) const {
    if (!in_range(c)) return false;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (!rule_holds(i, c)) return false;
    }
    return true;
}

Candidate ConfigSpace::repair(Candidate c) const {
    if (!in_range(c)) throw std::invalid_argument("repair: candidate out of range for space " + name_);
    // Each pass fixes every violated rule; rule chains settle within |rules| passes.
    for (std::size_t pass = 0; pass <= rules_.size(); ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            if (!rule_holds(i, c)) {
                c.values[resolved_[i].then_param] = static_cast<double>(resolved_[i].repair);
                changed = true;
            }
        }
        if (!changed) return c;
    }
    throw std::logic_error("repair: rules of space " + name_ + " do not settle");
}

std::string ConfigSpace::token(const Candidate& c) const {
    if (c.values.size() != params_.size()) throw std::invalid_argument("token: candidate length mismatch");
    std::string t;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) t += '|';
        const auto& p = params_[i];
        if (p.kind == ParamKind::categorical) {
            t += p.choices.at(static_cast<std::size_t>(c.values[i]));
        } else {
            t += fmt::format("{}={}", p.name, c.values[i]);
        }
    }
    return t;
}

std::string_view ConfigSpace::choice(const Candidate& c, std::string_view param) const {
    const auto i = index_of(param);
    const auto& p = params_[i];
    if (p.kind != ParamKind::categorical) throw std::invalid_argument(p.name + " is not categorical");
    return p.choices.at(static_cast<std::size_t>(c.values.at(i)));
}

double ConfigSpace::value(const Candidate& c, std::string_view param) const { return c.values.at(index_of(param)); }

std::vector<double> ConfigSpace::encode(const Candidate& c) const {
    if (c.values.size() != params_.size()) throw std::invalid_argument("encode: candidate length mismatch");
    std::vector<double> v(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        if (p.kind == ParamKind::categorical) {
            v[i] = (c.values[i] + 0.5) / static_cast<double>(p.choices.size());
        } else {
            v[i] = (c.values[i] - p.lo) / (p.hi - p.lo);
        }
    }
    return v;
}

Candidate ConfigSpace::decode(std::span<const double> v) const {
    if (v.size() != params_.size()) throw std::invalid_argument("decode: vector length mismatch");
    Candidate c;
    c.values.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        const double u = std::clamp(std::isnan(v[i]) ? 0.0 : v[i], 0.0, 1.0);
        switch (p.kind) {
            case ParamKind::continuous: c.values[i] = snap_continuous(p, u); break;
            case ParamKind::integer: c.values[i] = std::min(p.hi, std::floor(p.lo + u * (p.hi - p.lo) + 0.5)); break;
            case ParamKind::categorical: {
                const auto n = p.choices.size();
                c.values[i] = static_cast<double>(std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n))));
                break;
            }
        }
    }
    return repair(std::move(c));
}

Candidate ConfigSpace::sample_raw(Rng& rng) const {
    Candidate c;
    c.values.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& p = params_[i];
        switch (p.kind) {
            case ParamKind::continuous: c.values[i] = snap_continuous(p, rng.uniform()); break;
            case ParamKind::integer: c.values[i] = p.lo + static_cast<double>(rng.below(p.cardinality())); break;
            case ParamKind::categorical: c.values[i] = static_cast<double>(rng.below(p.choices.size())); break;
        }
    }
    return c;
}

Candidate ConfigSpace::sample_valid(Rng& rng) const {
    for (std::size_t attempt = 0; attempt < kMaxRejections; ++attempt) {
        auto c = sample_raw(rng);
        if (valid(c)) return c;
    }
    throw std::runtime_error("space " + name_ + " rejected 10000 samples in a row; it is over-constrained");
}

Candidate ConfigSpace::sample_valid(std::uint64_t seed) const {
    Rng rng(seed);
    return sample_valid(rng);
}

std::vector<Candidate> ConfigSpace::enumerate_raw() const {
    const auto total = raw_cardinality();
    std::vector<Candidate> out;
    out.reserve(total);
    Candidate c;
    c.values.assign(params_.size(), 0.0);
    for (std::size_t i = 0; i < params_.size(); ++i) c.values[i] = params_[i].kind == ParamKind::integer ? params_[i].lo : 0.0;
    for (std::uint64_t n = 0; n < total; ++n) {
        out.push_back(c);
        // Odometer with the last parameter varying fastest.
        for (std::size_t i = params_.size(); i-- > 0;) {
            const auto& p = params_[i];
            const double first = p.kind == ParamKind::integer ? p.lo : 0.0;
            const double last = first + static_cast<double>(p.cardinality() - 1);
            if (c.values[i] < last) {
                c.values[i] += 1.0;
                break;
            }
            c.values[i] = first;
        }
    }
    return out;
}

std::vector<Candidate> ConfigSpace::enumerate_valid() const {
    auto all = enumerate_raw();
    std::vector<Candidate> out;
    for (auto& c : all) {
        if (valid(c)) out.push_back(std::move(c));
    }
    return out;
}

ConfigSpace parse_space(std::string_view text, std::string name) {
    std::vector<ParamSpec> params;
    std::vector<Rule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument(fmt::format("{}:{}: {}", name, line_no, why));
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto w = words(line);
        if (w.empty()) continue;
        const auto& head = w[0];
        if (head == "mandatory" || head == "optional") {
            if (w.size() < 3 || w[1].back() != ':') fail("expected '" + head + " name: choice ...'");
            ParamSpec p;
            p.name = w[1].substr(0, w[1].size() - 1);
            p.kind = ParamKind::categorical;
            p.optional = head == "optional";
            p.choices.assign(w.begin() + 2, w.end());
            params.push_back(std::move(p));
        } else if (head == "continuous" || head == "integer") {
            if (w.size() != 4) fail("expected '" + head + " name lo hi'");
            ParamSpec p;
            p.name = w[1];
            p.kind = head == "continuous" ? ParamKind::continuous : ParamKind::integer;
            try {
                p.lo = std::stod(w[2]);
                p.hi = std::stod(w[3]);
            } catch (const std::exception&) {
                fail("bad numeric bound");
            }
            params.push_back(std::move(p));
        } else if (head == "rule") {
            // rule A in x,y requires B in u,v repair u
            if (w.size() != 10 || w[2] != "in" || w[4] != "requires" || w[6] != "in" || w[8] != "repair") {
                fail("expected 'rule A in x,y requires B in u,v repair u'");
            }
            rules.push_back({w[1], split_on(w[3], ','), w[5], split_on(w[7], ','), w[9]});
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    return ConfigSpace(std::move(name), std::move(params), std::move(rules));
}

ConfigSpace load_space(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open space manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_space(ss.str(), path.stem().string());
}

std::string_view aben_manifest() {
    return R"(# Analogy-based estimation design space
optional subset: all prune
optional weighting: uniform pearson spearman varRatio infoGain gainRatio chi2 relief
mandatory discretization: eqfreq eqwidth none
mandatory similarity: wEuclid uEuclid maxDist triKernel minkowski meanRank
mandatory adaptation: median mean regression wMean
mandatory analogy: k1 k2 k3 k4 k5 dynamic

# Binned weighting schemes need a discretizer.
rule weighting in infoGain,gainRatio,chi2 requires discretization in eqfreq,eqwidth repair eqfreq
# Every adaptation returns the same value for a single analogy.
rule analogy in k1 requires adaptation in median repair median
)";
}

std::string_view cart_manifest() {
    return R"(# Regression tree tuning ranges
continuous max_features 0.01 1
integer max_depth 1 12
integer min_sample_split 0 20
integer min_samples_leaf 1 12
)";
}

const ConfigSpace& aben_space() {
    static const ConfigSpace space = parse_space(aben_manifest(), "aben");
    return space;
}

const ConfigSpace& cart_space() {
    static const ConfigSpace space = parse_space(cart_manifest(), "cart");
    return space;
}

AbeConfig to_abe_config(const ConfigSpace& space, const Candidate& c) {
    return parse_abe_token(space.token(c));
}

Candidate from_abe_config(const ConfigSpace& space, const AbeConfig& config) {
    const auto labels = split_on(config.token(), '|');
    if (labels.size() != space.size()) throw std::invalid_argument("space does not match the ABE design");
    Candidate c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        c.values.push_back(static_cast<double>(choice_index(space.params()[i], labels[i])));
    }
    return c;
}

CartParams to_cart_params(const ConfigSpace& space, const Candidate& c) {
    CartParams p;
    p.max_features = space.value(c, "max_features");
    p.max_depth = static_cast<int>(space.value(c, "max_depth"));
    p.min_sample_split = static_cast<int>(space.value(c, "min_sample_split"));
    p.min_samples_leaf = static_cast<int>(space.value(c, "min_samples_leaf"));
    return p;
}

}  // namespace efftune
