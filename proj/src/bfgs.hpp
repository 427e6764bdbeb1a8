#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

namespace esgport::detail {

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Unconstrained quasi-Newton (BFGS) with central-difference gradients and a
/// backtracking Armijo line search. Converged when the relative decrease of
/// the objective over an iteration falls below `ftol` and the gradient is
/// small, or when the gradient vanishes outright.
inline MinimizeResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x, double ftol = 1e-8, int max_iter = 300) {
    const auto n = x.size();
    auto gradient = [&](const Eigen::VectorXd& at, double fx) {
        Eigen::VectorXd g(n);
        Eigen::VectorXd probe = at;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-5 * std::max(1.0, std::abs(at(i)));
            probe(i) = at(i) + h;
            const double fp = f(probe);
            probe(i) = at(i) - h;
            const double fm = f(probe);
            probe(i) = at(i);
            if (std::isfinite(fp) && std::isfinite(fm))
                g(i) = (fp - fm) / (2.0 * h);
            else if (std::isfinite(fp))
                g(i) = (fp - fx) / h;
            else if (std::isfinite(fm))
                g(i) = (fx - fm) / h;
            else
                g(i) = 0.0;
        }
        return g;
    };

    MinimizeResult res;
    double fx = f(x);
    if (!std::isfinite(fx)) {
        res.x = x;
        return res;
    }
    Eigen::VectorXd g = gradient(x, fx);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    int small_steps = 0;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        if (g.lpNorm<Eigen::Infinity>() < 1e-10) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        double f_new = fx;
        Eigen::VectorXd x_new = x;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent along a usable direction: treat as converged only if
            // the gradient is already tiny relative to the objective.
            res.converged = g.norm() <= 1e-6 * std::max(1.0, std::abs(fx));
            break;
        }
        const Eigen::VectorXd g_new = gradient(x_new, f_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        const double rel = std::abs(fx - f_new) / std::max(1.0, std::abs(fx));
        x = x_new;
        fx = f_new;
        g = g_new;
        small_steps = rel < ftol ? small_steps + 1 : 0;
        if (small_steps >= 2) {
            res.converged = true;
            break;
        }
    }
    res.x = x;
    res.value = fx;
    return res;
}

}  // namespace esgport::detail
