#include "efftune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace efftune {

double mre(double actual, double predicted) {
    if (!(actual > 0)) throw std::domain_error("mre: actual effort must be positive");
    return std::abs(actual - predicted) / actual;
}

double mae(std::span<const double> actuals, std::span<const double> predictions) {
    if (actuals.size() != predictions.size()) throw std::invalid_argument("mae: length mismatch");
    if (actuals.empty()) throw std::invalid_argument("mae: empty input");
    double sum = 0;
    for (std::size_t i = 0; i < actuals.size(); ++i) sum += std::abs(actuals[i] - predictions[i]);
    return sum / static_cast<double>(actuals.size());
}

double sa(double mae_model, double mae_guess) {
    if (!(mae_guess > 0)) throw std::domain_error("sa: guessing MAE is zero (degenerate efforts)");
    return (1.0 - mae_model / mae_guess) * 100.0;
}

double median_mre(std::span<const double> actuals, std::span<const double> predictions) {
    if (actuals.size() != predictions.size()) throw std::invalid_argument("median_mre: length mismatch");
    std::vector<double> errs;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (actuals[i] > 0) errs.push_back(mre(actuals[i], predictions[i]));
    }
    if (errs.empty()) return std::numeric_limits<double>::quiet_NaN();
    return median(std::move(errs));
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile of an empty list");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

double iqr(std::vector<double> values) {
    return percentile(values, 75.0) - percentile(values, 25.0);
}

}  // namespace efftune
