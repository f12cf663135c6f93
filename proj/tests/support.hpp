#pragma once

#include "efftune/dataset.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline std::filesystem::path data_dir() { return EFFTUNE_DATA_DIR; }
inline std::filesystem::path surrogate_dir() { return data_dir() / "surrogate"; }

inline efftune::Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<double>& efforts,
                                     const std::string& name = "t") {
    std::vector<std::string> names;
    const std::size_t f = rows.empty() ? 0 : rows[0].size();
    for (std::size_t j = 0; j < f; ++j) names.push_back("x" + std::to_string(j));
    std::vector<double> cells;
    for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
    return efftune::Dataset(name, names, cells, efforts);
}

inline std::vector<std::vector<double>> rows_of(const efftune::Dataset& d) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < d.row_count(); ++i) out.emplace_back(d.row(i).begin(), d.row(i).end());
    return out;
}

/// Small integer-valued features so that ties and repeated values are common.
inline efftune::Dataset random_dataset(std::mt19937_64& gen, std::size_t rows, std::size_t features,
                                       int value_range = 6) {
    std::uniform_int_distribution<int> v(0, value_range);
    std::uniform_real_distribution<double> e(1.0, 100.0);
    std::vector<std::vector<double>> x(rows, std::vector<double>(features));
    std::vector<double> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& c : x[i]) c = v(gen);
        y[i] = std::round(e(gen));
    }
    return make_dataset(x, y);
}

inline const std::vector<std::string>& surrogate_names() {
    static const std::vector<std::string> names{"kemerer", "albrecht", "isbsg10", "finnish", "miyazaki",
                                                "maxwell", "desharnais", "kitchenham", "china"};
    return names;
}

}  // namespace testing_support
