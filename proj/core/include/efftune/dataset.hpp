#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace efftune {

/// Raised for malformed input files and violated data preconditions.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Labels of a text-valued column, in code order.
using Codebook = std::vector<std::string>;

/// Projects x features matrix with one effort per project.
///
/// Rows are stored row-major. Every row carries a stable id (its position in
/// the file it was loaded from) that survives subsetting and cleaning, so
/// tie-breaks and fold bookkeeping never depend on storage order.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string name, std::vector<std::string> feature_names,
            std::vector<double> cells, std::vector<double> efforts,
            std::vector<std::size_t> row_ids = {},
            std::map<std::size_t, Codebook> codebooks = {});

    const std::string& name() const { return name_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    std::size_t feature_count() const { return feature_names_.size(); }
    std::size_t row_count() const { return efforts_.size(); }
    bool empty() const { return efforts_.empty(); }

    std::span<const double> row(std::size_t i) const {
        return {cells_.data() + i * feature_count(), feature_count()};
    }
    double at(std::size_t row, std::size_t feature) const {
        return cells_[row * feature_count() + feature];
    }
    std::vector<double> column(std::size_t feature) const;

    const std::vector<double>& cells() const { return cells_; }
    const std::vector<double>& efforts() const { return efforts_; }
    double effort(std::size_t i) const { return efforts_[i]; }
    const std::vector<std::size_t>& row_ids() const { return row_ids_; }

    /// Codebooks of text-coded columns, keyed by feature index.
    const std::map<std::size_t, Codebook>& codebooks() const { return codebooks_; }
    /// True for features that were text-coded at load.
    std::vector<bool> categorical_mask() const;

    std::optional<std::size_t> feature_index(const std::string& name) const;

    /// Rows at the given positions, in the given order.
    Dataset subset(std::span<const std::size_t> positions) const;

private:
    std::string name_;
    std::vector<std::string> feature_names_;
    std::vector<double> cells_;
    std::vector<double> efforts_;
    std::vector<std::size_t> row_ids_;
    std::map<std::size_t, Codebook> codebooks_;
};

struct LoadOptions {
    /// Explicit effort column. Otherwise a column named "effort"
    /// (any case), otherwise the last column.
    std::optional<std::string> effort_column;
    /// Frozen codebooks by column name. Labels outside them are errors.
    std::map<std::string, Codebook> codebooks;
    /// Dataset name; defaults to the file stem.
    std::optional<std::string> name;
};

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_csv(const std::string& text, const std::string& name,
                  const LoadOptions& options = {});

/// Drops the named feature columns. Unknown names are errors.
Dataset clean(const Dataset& d, std::span<const std::string> drop);

/// Reads a cleaning manifest: one column name per line, '#' comments.
std::vector<std::string> load_drop_list(const std::filesystem::path& path);

/// Per-column min..max scaling fitted on one table and applied to others.
///
/// Constant columns map to 0. Values outside the fitted range clamp to [0,1].
class MinMaxScaler {
public:
    MinMaxScaler() = default;
    static MinMaxScaler fit(const Dataset& d);

    std::vector<double> transform(std::span<const double> row) const;
    /// Maps a scaled row back to raw units (exact for non-constant columns).
    std::vector<double> inverse(std::span<const double> scaled) const;
    Dataset transform(const Dataset& d) const;

    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }

private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

struct NormalizedDataset {
    Dataset data;
    MinMaxScaler scaler;
};

/// Min-max normalizes feature columns; efforts are untouched.
NormalizedDataset normalize_minmax(const Dataset& d);

/// One shuffled partition of row positions into N bins.
struct FoldPlan {
    std::size_t repeat_index = 0;
    std::uint64_t seed = 0;
    std::size_t bins = 0;
    std::vector<std::size_t> bin_of_row;

    std::vector<std::size_t> test_positions(std::size_t bin) const;
    std::vector<std::size_t> train_positions(std::size_t bin) const;

    bool operator==(const FoldPlan&) const = default;
};

std::vector<FoldPlan> make_folds(std::size_t row_count, std::size_t repeats, std::size_t bins,
                                 std::uint64_t seed);
std::vector<FoldPlan> make_folds(const Dataset& d, std::size_t repeats, std::size_t bins,
                                 std::uint64_t seed);

/// Published shape of one benchmark dataset before cleaning.
struct RosterEntry {
    std::string name;
    std::size_t projects;
    std::size_t features;
};

/// The nine effort datasets, smallest first.
const std::vector<RosterEntry>& dataset_roster();

}  // namespace efftune
