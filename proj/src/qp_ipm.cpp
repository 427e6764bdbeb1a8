#include "qp_ipm.hpp"

#include <algorithm>
#include <cmath>

namespace esgport::detail {

namespace {

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, int max_iterations, double tol) {
    const Eigen::Index n = qp.c.size();
    const Eigen::Index m = qp.b.size();
    QpResult res;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    const double bscale = 1.0 + qp.b.lpNorm<Eigen::Infinity>();
    const double cscale = 1.0 + qp.c.lpNorm<Eigen::Infinity>();

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    K.bottomLeftCorner(m, n) = qp.A;
    K.topRightCorner(n, m) = -qp.A.transpose();
    Eigen::VectorXd rhs(n + m);

    auto residuals = [&](Eigen::VectorXd& rp, Eigen::VectorXd& rd) {
        rp = qp.A * x - qp.b;
        rd = qp.Q * x + qp.c - qp.A.transpose() * y - z;
    };
    Eigen::VectorXd rp, rd;
    for (int it = 0; it < max_iterations; ++it) {
        residuals(rp, rd);
        const double mu = x.dot(z) / static_cast<double>(n);
        res.iterations = it;
        if (rp.lpNorm<Eigen::Infinity>() <= tol * bscale && rd.lpNorm<Eigen::Infinity>() <= tol * cscale &&
            mu <= tol) {
            res.converged = true;
            break;
        }
        K.topLeftCorner(n, n) = qp.Q;
        K.topLeftCorner(n, n).diagonal() += (z.array() / x.array()).matrix();
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

        auto solve = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz) {
            rhs.head(n) = -rd + (rc.array() / x.array()).matrix();
            rhs.tail(m) = -rp;
            const Eigen::VectorXd sol = lu.solve(rhs);
            dx = sol.head(n);
            dy = sol.tail(m);
            dz = ((rc.array() - z.array() * dx.array()) / x.array()).matrix();
        };

        Eigen::VectorXd dx, dy, dz;
        Eigen::VectorXd rc = -(x.array() * z.array()).matrix();
        solve(rc, dx, dy, dz);
        const double ap_aff = max_step(x, dx);
        const double ad_aff = max_step(z, dz);
        const double mu_aff = (x + ap_aff * dx).dot(z + ad_aff * dz) / static_cast<double>(n);
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

        rc = (-(x.array() * z.array()) - dx.array() * dz.array() + sigma * mu).matrix();
        solve(rc, dx, dy, dz);
        const double ap = std::min(1.0, 0.99 * max_step(x, dx));
        const double ad = std::min(1.0, 0.99 * max_step(z, dz));
        x += ap * dx;
        y += ad * dy;
        z += ad * dz;
        res.iterations = it + 1;
    }
    residuals(rp, rd);
    res.primal_residual = rp.lpNorm<Eigen::Infinity>();
    res.dual_residual = rd.lpNorm<Eigen::Infinity>();
    res.complementarity = x.dot(z) / static_cast<double>(n);
    if (!res.converged)
        res.converged = res.primal_residual <= 1e-9 * bscale && res.dual_residual <= 1e-9 * cscale &&
                        res.complementarity <= 1e-10;
    res.gap = x.dot(qp.Q * x) + qp.c.dot(x) - qp.b.dot(y);
    res.x = std::move(x);
    res.y = std::move(y);
    res.z = std::move(z);
    return res;
}

}  // namespace esgport::detail
