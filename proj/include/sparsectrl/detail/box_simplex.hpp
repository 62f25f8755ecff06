#pragma once

#include <Eigen/Dense>

namespace sparsectrl::detail {

enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    LpStatus status = LpStatus::optimal;
    int iterations = 0;
};

/// Primal two-phase simplex for box-constrained linear programs
///
///   minimize c'x  subject to  A x = b,  lower <= x <= upper
///
/// with all bounds finite. Dense, intended for problems with few equality
/// rows (the basis stays tiny) and many columns. Not a general LP solver:
/// no free variables, no presolve, Dantzig pricing with a Bland fallback
/// for anti-cycling.
LpResult solve_box_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& c, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper, int max_iterations = 0);

}  // namespace sparsectrl::detail
