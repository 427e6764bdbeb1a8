#pragma once

#include <Eigen/Dense>
#include <limits>

namespace esgport::detail {

/// min c'x  s.t.  A x = b,  lower <= x <= upper  (bounds may be infinite).
struct LpProblem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    Eigen::VectorXd x;
    /// Simplex multipliers: c_B = B' y at the final basis.
    Eigen::VectorXd y;
    double objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

/// Two-phase bounded revised simplex with a dense explicit basis inverse.
/// Intended for few rows and many columns.
LpResult solve_lp(const LpProblem& lp, int max_iterations = 200000);

}  // namespace esgport::detail
