#include "efftune/baselines.hpp"

#include "efftune/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace efftune {

const char* to_string(Transform t) {
    switch (t) {
        case Transform::identity: return "identity";
        case Transform::sqrt: return "sqrt";
        case Transform::log1p: return "log1p";
    }
    return "?";
}

double adjusted_skewness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) return 0.0;
    const double dn = static_cast<double>(n);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / dn;
    double m2 = 0, m3 = 0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= dn;
    m3 /= dn;
    if (m2 <= 1e-300 || m2 <= 1e-24 * mean * mean) return 0.0;
    const double g1 = m3 / std::pow(m2, 1.5);
    return std::sqrt(dn * (dn - 1)) / (dn - 2) * g1;
}

double apply_transform(Transform t, double x) {
    switch (t) {
        case Transform::identity: return x;
        case Transform::sqrt: return std::sqrt(x);
        case Transform::log1p: return std::log1p(x);
    }
    return x;
}

Transform least_skewed_transform(std::span<const double> values) {
    if (values.empty()) return Transform::identity;
    const double lo = *std::min_element(values.begin(), values.end());
    Transform best = Transform::identity;
    double best_skew = std::abs(adjusted_skewness(values));
    std::vector<double> tmp(values.size());
    for (Transform t : {Transform::sqrt, Transform::log1p}) {
        if (t == Transform::sqrt && lo < 0) continue;
        if (t == Transform::log1p && lo <= -1) continue;
        std::transform(values.begin(), values.end(), tmp.begin(), [t](double v) { return apply_transform(t, v); });
        const double s = std::abs(adjusted_skewness(tmp));
        if (s < best_skew - 1e-12) {
            best = t;
            best_skew = s;
        }
    }
    return best;
}

std::vector<double> AtlmModel::design_row(std::span<const double> row) const {
    if (row.size() != transforms.size()) throw std::invalid_argument("ATLM arity mismatch");
    std::vector<double> out;
    for (std::size_t f = 0; f < row.size(); ++f) {
        if (categorical[f]) {
            const auto& lv = levels[f];
            for (std::size_t k = 1; k < lv.size(); ++k) out.push_back(row[f] == lv[k] ? 1.0 : 0.0);
        } else {
            out.push_back(apply_transform(transforms[f], row[f]));
        }
    }
    return out;
}

double AtlmModel::predict(std::span<const double> row) const {
    auto x = design_row(row);
    double y = coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[j + 1] * x[j];
    return y;
}

AtlmModel atlm_fit(const Dataset& train, const std::vector<bool>& categorical_mask) {
    const std::size_t f = train.feature_count();
    if (categorical_mask.size() != f) throw std::invalid_argument("ATLM: categorical mask arity mismatch");
    AtlmModel m;
    m.categorical = categorical_mask;
    m.transforms.assign(f, Transform::identity);
    m.levels.assign(f, {});
    std::size_t p = 0;
    for (std::size_t j = 0; j < f; ++j) {
        auto col = train.column(j);
        if (categorical_mask[j]) {
            std::sort(col.begin(), col.end());
            col.erase(std::unique(col.begin(), col.end()), col.end());
            m.levels[j] = col;
            p += col.empty() ? 0 : col.size() - 1;
        } else {
            m.transforms[j] = least_skewed_transform(col);
            ++p;
        }
    }
    const std::size_t n = train.row_count();
    if (n < p + 2) {
        throw std::invalid_argument("ATLM: need at least " + std::to_string(p + 2) + " rows, got " +
                                    std::to_string(n));
    }
    Eigen::MatrixXd x(n, p + 1);
    Eigen::VectorXd y(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto d = m.design_row(train.row(r));
        x(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j + 1)) = d[j];
        y(static_cast<Eigen::Index>(r)) = train.effort(r);
    }
    Eigen::VectorXd beta = x.completeOrthogonalDecomposition().solve(y);
    m.coefficients.assign(beta.data(), beta.data() + beta.size());
    return m;
}

double atlm_predict(const AtlmModel& model, std::span<const double> row) { return model.predict(row); }

double Lp4eeModel::predict(std::span<const double> row) const {
    if (row.size() != coefficients.size()) throw std::invalid_argument("LP4EE arity mismatch");
    double y = 0;
    for (std::size_t i = 0; i < row.size(); ++i) y += coefficients[i] * row[i];
    return y;
}

LinearProgram lad_program(const Dataset& train) {
    const std::size_t m = train.row_count();
    const std::size_t n = train.feature_count();
    LinearProgram lp;
    lp.rows = m;
    lp.cols = 2 * n + 2 * m;
    lp.a.assign(lp.rows * lp.cols, 0.0);
    lp.b.assign(m, 0.0);
    lp.c.assign(lp.cols, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double* row = &lp.a[j * lp.cols];
        for (std::size_t i = 0; i < n; ++i) {
            row[i] = train.at(j, i);
            row[n + i] = -train.at(j, i);
        }
        row[2 * n + j] = 1.0;
        row[2 * n + m + j] = -1.0;
        lp.b[j] = train.effort(j);
    }
    for (std::size_t k = 2 * n; k < lp.cols; ++k) lp.c[k] = 1.0;
    return lp;
}

Lp4eeModel lp4ee_fit(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("LP4EE: empty training set");
    const std::size_t n = train.feature_count();
    auto sol = simplex_solve(lad_program(train));
    if (sol.status != LpStatus::optimal) throw SimplexError("LP4EE: least-absolute-deviation program not solved");
    Lp4eeModel m;
    m.coefficients.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.coefficients[i] = sol.x[i] - sol.x[n + i];
    m.training_sar = sol.objective;
    m.reduced_costs = std::move(sol.reduced_costs);
    m.iterations = sol.iterations;
    return m;
}

double lp4ee_predict(const Lp4eeModel& model, std::span<const double> row) { return model.predict(row); }

double sum_abs_residuals(const Dataset& d, std::span<const double> coefficients) {
    double sar = 0;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        double y = 0;
        for (std::size_t i = 0; i < coefficients.size(); ++i) y += coefficients[i] * d.at(r, i);
        sar += std::abs(d.effort(r) - y);
    }
    return sar;
}

MeanModel mean_predictor(std::span<const double> train_efforts) {
    if (train_efforts.empty()) throw std::invalid_argument("mean predictor: empty effort list");
    return {std::accumulate(train_efforts.begin(), train_efforts.end(), 0.0) /
            static_cast<double>(train_efforts.size())};
}

MeanModel mean_predictor(const Dataset& train) { return mean_predictor(train.efforts()); }

double random_guess_mae(std::span<const double> train_efforts, std::span<const double> test_actuals,
                        std::size_t runs, std::uint64_t seed) {
    if (train_efforts.empty() || test_actuals.empty()) throw std::invalid_argument("random guess: empty effort list");
    if (runs < 1) throw std::invalid_argument("random guess: runs must be >= 1");
    Rng rng(seed);
    double total = 0;
    for (std::size_t run = 0; run < runs; ++run) {
        double err = 0;
        for (double actual : test_actuals) err += std::abs(actual - train_efforts[rng.below(train_efforts.size())]);
        total += err / static_cast<double>(test_actuals.size());
    }
    return total / static_cast<double>(runs);
}

}  // namespace efftune
