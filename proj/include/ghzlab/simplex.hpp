#pragma once

#include <vector>

namespace ghzlab {

/// A dense linear program:  maximize c.x  subject to  row_i . x (op_i) rhs_i
/// and x >= 0. Small and self-contained; the problems in this project have at
/// most a few hundred variables and a handful of rows (or vice versa).
struct LpProblem {
    enum class Op { Le, Ge, Eq };

    std::vector<std::vector<double>> rows;
    std::vector<Op> ops;
    std::vector<double> rhs;
    std::vector<double> objective;

    void add_row(std::vector<double> coeff, Op op, double b);
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;
};

/// Two-phase dense tableau simplex. eps is the feasibility/pivot tolerance.
LpResult solve_lp(const LpProblem& problem, double eps = 1e-9);

} // namespace ghzlab
