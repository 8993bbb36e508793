#include "ghzlab/simplex.hpp"

#include "ghzlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace ghzlab {

void LpProblem::add_row(std::vector<double> coeff, Op op, double b) {
    rows.push_back(std::move(coeff));
    ops.push_back(op);
    rhs.push_back(b);
}

namespace {

// Tableau layout: columns = [structural vars | slack/surplus | artificials | rhs],
// one row per constraint plus an objective row at the end. Every constraint
// gets an artificial variable so the identity basis always exists; phase 1
// drives the artificials to zero, phase 2 optimizes the real objective with
// artificial columns barred from entering.
class Tableau {
  public:
    Tableau(const LpProblem& p, double eps) : eps_(eps), n_(p.objective.size()) {
        const std::size_t m = p.rows.size();
        slack_begin_ = n_;
        std::size_t n_slack = 0;
        for (const auto op : p.ops) {
            if (op != LpProblem::Op::Eq) {
                ++n_slack;
            }
        }
        art_begin_ = n_ + n_slack;
        cols_ = art_begin_ + m + 1;
        rhs_col_ = cols_ - 1;

        t_.assign(m + 1, std::vector<double>(cols_, 0.0));
        basis_.assign(m, 0);

        std::size_t slack_idx = slack_begin_;
        for (std::size_t i = 0; i < m; ++i) {
            if (p.rows[i].size() != n_) {
                throw ValidationError("LP row has wrong width");
            }
            double sign = 1.0;
            // Normalize to a nonnegative right-hand side.
            if (p.rhs[i] < 0) {
                sign = -1.0;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                t_[i][j] = sign * p.rows[i][j];
            }
            t_[i][rhs_col_] = sign * p.rhs[i];
            LpProblem::Op op = p.ops[i];
            if (sign < 0) {
                if (op == LpProblem::Op::Le) {
                    op = LpProblem::Op::Ge;
                } else if (op == LpProblem::Op::Ge) {
                    op = LpProblem::Op::Le;
                }
            }
            if (op == LpProblem::Op::Le) {
                t_[i][slack_idx++] = 1.0;
            } else if (op == LpProblem::Op::Ge) {
                t_[i][slack_idx++] = -1.0;
            }
            t_[i][art_begin_ + i] = 1.0;
            basis_[i] = art_begin_ + i;
        }
    }

    bool run_phase1() {
        auto& obj = t_.back();
        std::fill(obj.begin(), obj.end(), 0.0);
        // Minimize the artificial sum == maximize its negation.
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            obj[art_begin_ + i] = -1.0;
        }
        price_out();
        iterate(/*allow_artificial=*/true);
        // After pricing the objective row's rhs holds -z, i.e. the artificial sum.
        return t_.back()[rhs_col_] <= eps_;
    }

    // Returns false when the objective is unbounded above.
    bool run_phase2(const std::vector<double>& objective) {
        drive_out_artificials();
        auto& obj = t_.back();
        std::fill(obj.begin(), obj.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            obj[j] = objective[j];
        }
        price_out();
        return iterate(/*allow_artificial=*/false);
    }

    double objective_value() const { return -t_.back()[rhs_col_]; }

    std::vector<double> solution() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i] < n_) {
                x[basis_[i]] = t_[i][rhs_col_];
            }
        }
        return x;
    }

  private:
    void price_out() {
        auto& obj = t_.back();
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            const double c = obj[basis_[i]];
            if (c != 0.0) {
                for (std::size_t j = 0; j < cols_; ++j) {
                    obj[j] -= c * t_[i][j];
                }
            }
        }
    }

    bool iterate(bool allow_artificial) {
        const std::size_t m = basis_.size();
        // Dantzig rule with a Bland fallback once the iteration count grows;
        // cycling is a real hazard on these degenerate game polytopes.
        const std::size_t bland_after = 50 * (m + cols_);
        const std::size_t max_iter = 500 * (m + cols_) + 10000;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            const bool bland = iter >= bland_after;
            const std::size_t limit = allow_artificial ? cols_ - 1 : art_begin_;
            std::size_t pivot_col = cols_;
            double best = eps_;
            for (std::size_t j = 0; j < limit; ++j) {
                const double rc = t_.back()[j];
                if (rc > (bland ? eps_ : best)) {
                    pivot_col = j;
                    if (bland) {
                        break;
                    }
                    best = rc;
                }
            }
            if (pivot_col == cols_) {
                return true; // optimal
            }
            std::size_t pivot_row = m;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                const double a = t_[i][pivot_col];
                if (a > eps_) {
                    const double ratio = t_[i][rhs_col_] / a;
                    if (ratio < best_ratio - eps_ ||
                        (ratio < best_ratio + eps_ && pivot_row < m &&
                         basis_[i] < basis_[pivot_row])) {
                        best_ratio = ratio;
                        pivot_row = i;
                    }
                }
            }
            if (pivot_row == m) {
                return false; // unbounded
            }
            pivot(pivot_row, pivot_col);
        }
        throw ValidationError("simplex iteration limit exceeded");
    }

    void drive_out_artificials() {
        // A degenerate phase-1 optimum can leave a zero-valued artificial in
        // the basis; pivot it out on any nonzero structural column.
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i] < art_begin_) {
                continue;
            }
            for (std::size_t j = 0; j < art_begin_; ++j) {
                if (std::fabs(t_[i][j]) > eps_) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = t_[row][col];
        for (std::size_t j = 0; j < cols_; ++j) {
            t_[row][j] /= p;
        }
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i == row) {
                continue;
            }
            const double f = t_[i][col];
            if (f != 0.0) {
                for (std::size_t j = 0; j < cols_; ++j) {
                    t_[i][j] -= f * t_[row][j];
                }
            }
        }
        basis_[row] = col;
    }

    double eps_;
    std::size_t n_;
    std::size_t slack_begin_ = 0;
    std::size_t art_begin_ = 0;
    std::size_t cols_ = 0;
    std::size_t rhs_col_ = 0;
    std::vector<std::vector<double>> t_;
    std::vector<std::size_t> basis_;
};

} // namespace

LpResult solve_lp(const LpProblem& problem, double eps) {
    Tableau tab(problem, eps);
    LpResult result;
    if (!tab.run_phase1()) {
        result.status = LpResult::Status::Infeasible;
        return result;
    }
    if (!tab.run_phase2(problem.objective)) {
        result.status = LpResult::Status::Unbounded;
        return result;
    }
    result.status = LpResult::Status::Optimal;
    result.value = tab.objective_value();
    result.x = tab.solution();
    return result;
}

} // namespace ghzlab
