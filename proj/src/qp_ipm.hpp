#pragma once

#include <Eigen/Dense>

namespace esgport::detail {

/// min 0.5 x'Qx + c'x  s.t.  A x = b,  x >= 0,  Q symmetric PSD.
struct QpProblem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct QpResult {
    bool converged = false;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd z;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double complementarity = 0.0;
    /// Primal minus Lagrangian dual objective.
    double gap = 0.0;
};

/// Mehrotra predictor-corrector on the dense KKT system.
QpResult solve_qp(const QpProblem& qp, int max_iterations = 200, double tol = 1e-12);

}  // namespace esgport::detail
