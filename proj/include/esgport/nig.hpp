#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "esgport/random.hpp"

namespace esgport {

/// Multivariate normal inverse Gaussian distribution as a normal mean-variance
/// mixture
///
///     X = location + W * skewness + sqrt(W) * A Z,   A A' = scale,
///
/// with Z standard normal and W inverse Gaussian with mean 1 and shape
/// `alpha_bar`. Fixing E[W] = 1 makes the parameterization identifiable.
struct NigParams {
    double alpha_bar = 1.0;
    Eigen::VectorXd location;
    Eigen::VectorXd skewness;
    Eigen::MatrixXd scale;

    Eigen::Index dim() const noexcept { return location.size(); }
    Eigen::VectorXd mean() const { return location + skewness; }
    /// Cov[X] = scale + Var[W] skewness skewness', with Var[W] = 1/alpha_bar.
    Eigen::MatrixXd covariance() const;
    void validate() const;
};

/// Classical one-dimensional parameters (alpha, beta, delta, mu) with density
/// proportional to K1(alpha sqrt(delta^2 + (x-mu)^2)) exp(beta (x-mu)).
struct ClassicalNig {
    double alpha;
    double beta;
    double delta;
    double mu;
};

ClassicalNig to_classical(const NigParams& p);
NigParams from_classical(const ClassicalNig& c);

/// log K_nu(x) for x > 0, stable for large x.
double log_bessel_k(double nu, double x);

double nig_log_density(const NigParams& p, const Eigen::Ref<const Eigen::VectorXd>& x);

struct NigFitOptions {
    int max_iterations = 500;
    double rel_tol = 1e-8;
    double min_alpha_bar = 1e-3;
    double max_alpha_bar = 1e6;
    /// Starting point for EM (e.g. the previous day's fit). Ignored when its
    /// dimension differs from the sample's.
    std::optional<NigParams> initial;
};

struct NigFitReport {
    NigParams params;
    std::vector<double> loglik_trace;  // per EM iteration, initial value first
    int iterations = 0;
    bool converged = false;
    bool ridge_repaired = false;
};

/// EM (MCECM) maximum-likelihood fit to the rows of a T x I matrix. Throws
/// ShapeError unless T > 10 I, and SingularError when the sample covariance
/// is not positive definite even after a ridge repair.
NigFitReport fit_joint_nig(const Eigen::MatrixXd& sample, const NigFitOptions& opts = {});

/// Draws from a fitted NIG; the Cholesky factor is computed once.
class NigSampler {
public:
    explicit NigSampler(const NigParams& p);
    void draw(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> out) const;
    const NigParams& params() const noexcept { return params_; }

private:
    NigParams params_;
    Eigen::MatrixXd chol_;
};

}  // namespace esgport
