#include "efftune/dataset.hpp"

#include "efftune/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace efftune {

Dataset::Dataset(std::string name, std::vector<std::string> feature_names,
                 std::vector<double> cells, std::vector<double> efforts,
                 std::vector<std::size_t> row_ids, std::map<std::size_t, Codebook> codebooks)
    : name_(std::move(name)),
      feature_names_(std::move(feature_names)),
      cells_(std::move(cells)),
      efforts_(std::move(efforts)),
      row_ids_(std::move(row_ids)),
      codebooks_(std::move(codebooks)) {
    if (cells_.size() != efforts_.size() * feature_names_.size()) {
        throw DataError("dataset " + name_ + ": cell count does not match rows x features");
    }
    if (row_ids_.empty()) {
        row_ids_.resize(efforts_.size());
        std::iota(row_ids_.begin(), row_ids_.end(), std::size_t{0});
    } else if (row_ids_.size() != efforts_.size()) {
        throw DataError("dataset " + name_ + ": row id count does not match rows");
    }
    std::set<std::string> seen;
    for (const auto& f : feature_names_) {
        if (!seen.insert(f).second) throw DataError("duplicate feature name: " + f);
    }
    for (double e : efforts_) {
        if (!std::isfinite(e) || e < 0) throw DataError("dataset " + name_ + ": effort must be finite and >= 0");
    }
    for (double c : cells_) {
        if (!std::isfinite(c)) throw DataError("dataset " + name_ + ": non-finite cell");
    }
}

std::vector<double> Dataset::column(std::size_t feature) const {
    std::vector<double> out(row_count());
    for (std::size_t i = 0; i < row_count(); ++i) out[i] = at(i, feature);
    return out;
}

std::vector<bool> Dataset::categorical_mask() const {
    std::vector<bool> mask(feature_count(), false);
    for (const auto& [idx, book] : codebooks_) mask[idx] = true;
    return mask;
}

std::optional<std::size_t> Dataset::feature_index(const std::string& name) const {
    auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
    if (it == feature_names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - feature_names_.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
    std::vector<double> cells;
    cells.reserve(positions.size() * feature_count());
    std::vector<double> efforts;
    std::vector<std::size_t> ids;
    for (auto p : positions) {
        if (p >= row_count()) throw DataError("subset position out of range");
        auto r = row(p);
        cells.insert(cells.end(), r.begin(), r.end());
        efforts.push_back(efforts_[p]);
        ids.push_back(row_ids_[p]);
    }
    Dataset out;
    out.name_ = name_;
    out.feature_names_ = feature_names_;
    out.cells_ = std::move(cells);
    out.efforts_ = std::move(efforts);
    out.row_ids_ = std::move(ids);
    out.codebooks_ = codebooks_;
    return out;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(trim(field));
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& name, const LoadOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> records;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size()) {
            throw DataError(name + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        }
        records.push_back(std::move(fields));
    }
    if (header.empty() || records.empty()) throw DataError(name + ": zero rows");

    std::set<std::string> seen;
    for (const auto& h : header) {
        if (h.empty()) throw DataError(name + ": empty header name");
        if (!seen.insert(h).second) throw DataError(name + ": duplicate header name " + h);
    }

    std::size_t effort_col = header.size() - 1;
    if (options.effort_column) {
        auto it = std::find(header.begin(), header.end(), *options.effort_column);
        if (it == header.end()) throw DataError(name + ": no effort column " + *options.effort_column);
        effort_col = static_cast<std::size_t>(it - header.begin());
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (lower(header[c]) == "effort") {
                effort_col = c;
                break;
            }
        }
    }
    if (header.size() < 2) throw DataError(name + ": need at least one feature and an effort column");

    const std::size_t rows = records.size();
    std::vector<std::string> features;
    std::vector<std::size_t> source_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == effort_col) continue;
        features.push_back(header[c]);
        source_cols.push_back(c);
    }

    std::vector<double> cells(rows * features.size());
    std::vector<double> efforts(rows);
    std::map<std::size_t, Codebook> codebooks;

    for (std::size_t r = 0; r < rows; ++r) {
        auto v = parse_number(records[r][effort_col]);
        if (!v) throw DataError(name + ": non-numeric effort '" + records[r][effort_col] + "' in row " + std::to_string(r + 1));
        efforts[r] = *v;
    }

    for (std::size_t f = 0; f < features.size(); ++f) {
        const std::size_t c = source_cols[f];
        auto frozen = options.codebooks.find(features[f]);
        bool numeric = frozen == options.codebooks.end();
        if (numeric) {
            for (std::size_t r = 0; r < rows && numeric; ++r) {
                if (records[r][c].empty()) throw DataError(name + ": missing value in column " + features[f]);
                numeric = parse_number(records[r][c]).has_value();
            }
        }
        if (numeric) {
            for (std::size_t r = 0; r < rows; ++r) cells[r * features.size() + f] = *parse_number(records[r][c]);
            continue;
        }
        Codebook book;
        if (frozen != options.codebooks.end()) {
            book = frozen->second;
        } else {
            std::set<std::string> labels;
            for (std::size_t r = 0; r < rows; ++r) labels.insert(records[r][c]);
            book.assign(labels.begin(), labels.end());
        }
        for (std::size_t r = 0; r < rows; ++r) {
            auto it = std::find(book.begin(), book.end(), records[r][c]);
            if (it == book.end()) {
                throw DataError(name + ": non-numeric cell '" + records[r][c] + "' in column " + features[f] +
                                " has no codebook entry");
            }
            cells[r * features.size() + f] = static_cast<double>(it - book.begin());
        }
        codebooks.emplace(f, std::move(book));
    }

    return Dataset(name, std::move(features), std::move(cells), std::move(efforts), {}, std::move(codebooks));
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), options.name.value_or(path.stem().string()), options);
}

Dataset clean(const Dataset& d, std::span<const std::string> drop) {
    std::set<std::size_t> dropped;
    for (const auto& n : drop) {
        auto idx = d.feature_index(n);
        if (!idx) throw DataError(d.name() + ": cannot drop unknown feature " + n);
        dropped.insert(*idx);
    }
    if (dropped.empty()) return d;

    std::vector<std::size_t> kept;
    for (std::size_t f = 0; f < d.feature_count(); ++f) {
        if (!dropped.count(f)) kept.push_back(f);
    }
    std::vector<std::string> names;
    std::map<std::size_t, Codebook> books;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        names.push_back(d.feature_names()[kept[k]]);
        auto it = d.codebooks().find(kept[k]);
        if (it != d.codebooks().end()) books.emplace(k, it->second);
    }
    std::vector<double> cells;
    cells.reserve(d.row_count() * kept.size());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        for (auto f : kept) cells.push_back(d.at(r, f));
    }
    return Dataset(d.name(), std::move(names), std::move(cells), d.efforts(), d.row_ids(), std::move(books));
}

std::vector<std::string> load_drop_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto name = trim(line);
        if (!name.empty()) out.push_back(name);
    }
    return out;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& d) {
    if (d.empty()) throw DataError("cannot fit scaler on an empty dataset");
    MinMaxScaler s;
    s.mins_.assign(d.feature_count(), 0.0);
    s.maxs_.assign(d.feature_count(), 0.0);
    for (std::size_t f = 0; f < d.feature_count(); ++f) {
        double lo = d.at(0, f), hi = lo;
        for (std::size_t r = 1; r < d.row_count(); ++r) {
            lo = std::min(lo, d.at(r, f));
            hi = std::max(hi, d.at(r, f));
        }
        s.mins_[f] = lo;
        s.maxs_[f] = hi;
    }
    return s;
}

std::vector<double> MinMaxScaler::transform(std::span<const double> row) const {
    if (row.size() != mins_.size()) throw DataError("scaler arity mismatch");
    std::vector<double> out(row.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
        const double span = maxs_[f] - mins_[f];
        out[f] = span > 0 ? std::clamp((row[f] - mins_[f]) / span, 0.0, 1.0) : 0.0;
    }
    return out;
}

std::vector<double> MinMaxScaler::inverse(std::span<const double> scaled) const {
    if (scaled.size() != mins_.size()) throw DataError("scaler arity mismatch");
    std::vector<double> out(scaled.size());
    for (std::size_t f = 0; f < scaled.size(); ++f) out[f] = mins_[f] + scaled[f] * (maxs_[f] - mins_[f]);
    return out;
}

Dataset MinMaxScaler::transform(const Dataset& d) const {
    std::vector<double> cells;
    cells.reserve(d.cells().size());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        auto t = transform(d.row(r));
        cells.insert(cells.end(), t.begin(), t.end());
    }
    return Dataset(d.name(), d.feature_names(), std::move(cells), d.efforts(), d.row_ids(), d.codebooks());
}

NormalizedDataset normalize_minmax(const Dataset& d) {
    auto scaler = MinMaxScaler::fit(d);
    auto data = scaler.transform(d);
    return {std::move(data), std::move(scaler)};
}

std::vector<std::size_t> FoldPlan::test_positions(std::size_t bin) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bin_of_row.size(); ++i) {
        if (bin_of_row[i] == bin) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_positions(std::size_t bin) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bin_of_row.size(); ++i) {
        if (bin_of_row[i] != bin) out.push_back(i);
    }
    return out;
}

std::vector<FoldPlan> make_folds(std::size_t row_count, std::size_t repeats, std::size_t bins,
                                 std::uint64_t seed) {
    if (repeats < 1) throw DataError("make_folds: repeats must be >= 1");
    if (bins < 2) throw DataError("make_folds: bins must be >= 2");
    if (bins > row_count) throw DataError("make_folds: more bins than rows");
    std::vector<FoldPlan> plans;
    plans.reserve(repeats);
    for (std::size_t m = 0; m < repeats; ++m) {
        FoldPlan plan;
        plan.repeat_index = m;
        plan.seed = mix_seed({seed, m});
        plan.bins = bins;
        std::vector<std::size_t> order(row_count);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(plan.seed);
        rng.shuffle(order);
        plan.bin_of_row.assign(row_count, 0);
        for (std::size_t p = 0; p < row_count; ++p) plan.bin_of_row[order[p]] = p % bins;
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<FoldPlan> make_folds(const Dataset& d, std::size_t repeats, std::size_t bins,
                                 std::uint64_t seed) {
    return make_folds(d.row_count(), repeats, bins, seed);
}

const std::vector<RosterEntry>& dataset_roster() {
    static const std::vector<RosterEntry> roster{
        {"kemerer", 15, 6},   {"albrecht", 24, 7},   {"isbsg10", 37, 11},
        {"finnish", 38, 7},   {"miyazaki", 48, 7},   {"maxwell", 62, 25},
        {"desharnais", 77, 6}, {"kitchenham", 145, 6}, {"china", 499, 16},
    };
    return roster;
}

}  // namespace efftune
