#include "efftune/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace efftune {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const std::size_t width = cols_ + 1;
        double* prow = &t_[pr * width];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            double* row = &t_[r * width];
            const double factor = row[pc];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) row[c] -= factor * prow[c];
            row[pc] = 0.0;
        }
    }

    void drop_row(std::size_t r) {
        const std::size_t width = cols_ + 1;
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r * width),
                 t_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> t_;
};

struct PhaseResult {
    bool unbounded = false;
};

// Reduced costs d_j = c_j - sum_i c_{basis[i]} T[i][j].
std::vector<double> reduced_costs(const Tableau& t, const std::vector<double>& cost,
                                  const std::vector<std::size_t>& basis) {
    std::vector<double> d(cost);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double cb = cost[basis[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < t.cols(); ++j) d[j] -= cb * t.at(i, j);
    }
    return d;
}

PhaseResult run_phase(Tableau& t, const std::vector<double>& cost, std::vector<std::size_t>& basis,
                      const std::vector<bool>& allowed, std::size_t& iterations, std::size_t cap) {
    std::vector<double> d = reduced_costs(t, cost, basis);
    for (;;) {
        // Bland: lowest-index improving column enters.
        std::size_t enter = t.cols();
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (allowed[j] && d[j] < -kCostTol) {
                enter = j;
                break;
            }
        }
        if (enter == t.cols()) return {};

        std::size_t leave = t.rows();
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= kPivotTol) continue;
            const double ratio = t.rhs(i) / a;
            if (leave == t.rows()) {
                best_ratio = ratio;
                leave = i;
                continue;
            }
            // Bland: among minimal ratios the lowest basic variable index leaves.
            const double tol = 1e-12 * std::max(1.0, std::abs(best_ratio));
            if (ratio < best_ratio - tol || (std::abs(ratio - best_ratio) <= tol && basis[i] < basis[leave])) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == t.rows()) return {true};

        if (++iterations > cap) {
            throw SimplexError("simplex exceeded " + std::to_string(cap) + " iterations");
        }
        t.pivot(leave, enter);
        basis[leave] = enter;

        const double de = d[enter];
        for (std::size_t j = 0; j < t.cols(); ++j) d[j] -= de * t.at(leave, j);
        d[enter] = 0.0;
    }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, std::size_t max_iterations) {
    const std::size_t m = lp.rows;
    const std::size_t n = lp.cols;
    if (lp.a.size() != m * n || lp.b.size() != m || lp.c.size() != n) {
        throw std::invalid_argument("simplex_solve: inconsistent problem dimensions");
    }
    const std::size_t cap = max_iterations ? max_iterations : 50 * (m + n) + 1000;

    // Negate rows so that b >= 0.
    std::vector<double> a(lp.a);
    std::vector<double> b(lp.b);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0) {
            b[i] = -b[i];
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = -a[i * n + j];
        }
    }

    // Seed the basis with existing unit columns; artificials cover the rest.
    std::vector<std::size_t> basis(m, std::numeric_limits<std::size_t>::max());
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t hit = m;
        bool unit = true;
        for (std::size_t i = 0; i < m && unit; ++i) {
            const double v = a[i * n + j];
            if (v == 0.0) continue;
            if (v == 1.0 && hit == m) {
                hit = i;
            } else {
                unit = false;
            }
        }
        if (unit && hit < m && basis[hit] == std::numeric_limits<std::size_t>::max()) {
            basis[hit] = j;
            used[j] = true;
        }
    }
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] == std::numeric_limits<std::size_t>::max()) ++artificials;
    }

    const std::size_t total = n + artificials;
    Tableau t(m, total);
    std::size_t next_art = n;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = a[i * n + j];
        t.rhs(i) = b[i];
        if (basis[i] == std::numeric_limits<std::size_t>::max()) {
            t.at(i, next_art) = 1.0;
            basis[i] = next_art++;
        }
    }

    LpSolution sol;
    std::size_t iterations = 0;

    // Phase one: drive the artificials to zero.
    if (artificials > 0) {
        std::vector<double> cost1(total, 0.0);
        for (std::size_t j = n; j < total; ++j) cost1[j] = 1.0;
        std::vector<bool> allowed(total, true);
        run_phase(t, cost1, basis, allowed, iterations, cap);
        double infeasibility = 0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            if (basis[i] >= n) infeasibility += t.rhs(i);
        }
        double scale = 1.0;
        for (double v : b) scale = std::max(scale, std::abs(v));
        if (infeasibility > 1e-9 * scale) {
            sol.status = LpStatus::infeasible;
            sol.iterations = iterations;
            return sol;
        }
        // Pivot remaining zero-level artificials out, or drop redundant rows.
        for (std::size_t i = 0; i < t.rows();) {
            if (basis[i] < n) {
                ++i;
                continue;
            }
            std::size_t col = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(t.at(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col == n) {
                t.drop_row(i);
                basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            t.pivot(i, col);
            basis[i] = col;
            ++i;
        }
    }

    // Phase two on the original costs; artificials may not re-enter.
    std::vector<double> cost2(total, 0.0);
    std::copy(lp.c.begin(), lp.c.end(), cost2.begin());
    std::vector<bool> allowed(total, false);
    std::fill(allowed.begin(), allowed.begin() + static_cast<std::ptrdiff_t>(n), true);
    auto phase2 = run_phase(t, cost2, basis, allowed, iterations, cap);
    sol.iterations = iterations;
    if (phase2.unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        if (basis[i] < n) sol.x[basis[i]] = t.rhs(i);
    }
    sol.objective = 0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
    auto d = reduced_costs(t, cost2, basis);
    sol.reduced_costs.assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n));
    return sol;
}

}  // namespace efftune
