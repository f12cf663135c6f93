#pragma once

#include "efftune/dataset.hpp"
#include "efftune/simplex.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace efftune {

enum class Transform { identity, sqrt, log1p };

const char* to_string(Transform t);

/// Adjusted Fisher-Pearson sample skewness (G1). Zero for n < 3 or constant data.
double adjusted_skewness(std::span<const double> values);

/// Transform with the smallest |G1|; ties prefer identity, then sqrt, then log1p.
/// sqrt needs non-negative values and log1p values above -1.
Transform least_skewed_transform(std::span<const double> values);

double apply_transform(Transform t, double x);

/// Linear model on skew-reduced, dummy-coded features.
struct AtlmModel {
    std::vector<Transform> transforms;   // per feature; identity for categoricals
    std::vector<bool> categorical;
    std::vector<std::vector<double>> levels;  // per feature; levels[0] is the reference
    std::vector<double> coefficients;         // intercept first, then expanded design columns

    /// Expanded design row (without the intercept).
    std::vector<double> design_row(std::span<const double> row) const;
    double predict(std::span<const double> row) const;
};

/// Least-squares fit; rank-deficient designs get the minimum-norm solution.
/// Needs at least p + 2 rows, p being the expanded column count.
AtlmModel atlm_fit(const Dataset& train, const std::vector<bool>& categorical_mask);
double atlm_predict(const AtlmModel& model, std::span<const double> row);

/// Sum-of-absolute-residuals linear model with no intercept.
struct Lp4eeModel {
    std::vector<double> coefficients;
    double training_sar = 0.0;
    /// Reduced costs of the final simplex tableau (optimality certificate).
    std::vector<double> reduced_costs;
    std::size_t iterations = 0;

    double predict(std::span<const double> row) const;
};

/// The least-absolute-deviation program, in simplex standard form.
/// Columns: a+ (n), a- (n), u (m), w (m).
LinearProgram lad_program(const Dataset& train);
Lp4eeModel lp4ee_fit(const Dataset& train);
double lp4ee_predict(const Lp4eeModel& model, std::span<const double> row);

/// Sum of absolute residuals of a no-intercept linear model.
double sum_abs_residuals(const Dataset& d, std::span<const double> coefficients);

struct MeanModel {
    double mean = 0.0;
    double predict(std::span<const double>) const { return mean; }
};

MeanModel mean_predictor(std::span<const double> train_efforts);
MeanModel mean_predictor(const Dataset& train);

/// Mean, over `runs`, of the MAE from predicting every test project with a
/// uniformly drawn training effort.
double random_guess_mae(std::span<const double> train_efforts, std::span<const double> test_actuals,
                        std::size_t runs, std::uint64_t seed);

}  // namespace efftune
