#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace efftune {

/// minimize c.x subject to A x = b, x >= 0. A is row-major, rows x cols.
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    /// c_j - c_B B^-1 A_j at termination; all >= -tol at an optimum.
    std::vector<double> reduced_costs;
    std::size_t iterations = 0;
};

/// Thrown when pivoting exceeds the iteration cap.
class SimplexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense two-phase tableau simplex with Bland's anticycling rule.
///
/// Rows whose right-hand side is negative are negated first. Columns that
/// already form a unit vector seed the phase-one basis; remaining rows get
/// artificial variables. `max_iterations == 0` picks a cap from the size.
LpSolution simplex_solve(const LinearProgram& lp, std::size_t max_iterations = 0);

}  // namespace efftune
