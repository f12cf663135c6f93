#pragma once

#include <span>
#include <string>
#include <vector>

namespace efftune {

/// Magnitude of relative error |actual - predicted| / actual. actual must be > 0.
double mre(double actual, double predicted);

/// Mean absolute residual. Lengths must match and be nonzero.
double mae(std::span<const double> actuals, std::span<const double> predictions);

/// Standardized accuracy in percent: (1 - mae_model / mae_guess) * 100.
double sa(double mae_model, double mae_guess);

/// Median MRE over rows with a positive actual effort. NaN if there are none.
double median_mre(std::span<const double> actuals, std::span<const double> predictions);

double median(std::vector<double> values);
/// Linear-interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);
/// 75th minus 25th percentile.
double iqr(std::vector<double> values);

/// Test-set outcome of one treatment on one cross-validation cell.
struct FoldScore {
    std::string treatment;
    std::string dataset;
    std::size_t repeat = 0;
    std::size_t fold = 0;
    double mdmre = 0.0;    // median MRE, as a fraction
    double sa = 0.0;       // percent
    double seconds = 0.0;  // wall clock for tuning + fit + test

    bool operator==(const FoldScore&) const = default;
};

}  // namespace efftune
