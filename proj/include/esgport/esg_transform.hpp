#pragma once

#include <Eigen/Dense>

namespace esgport {

/// ESG affinity lambda in [0,1] and the return-period scale c (trading days
/// per year for daily data).
struct EsgBlendParams {
    double lambda = 0.0;
    double c = 255.0;

    /// Throws DomainError if lambda is outside [0,1] or c <= 0.
    void validate() const;
};

/// zeta = lambda * sigma / c + (1 - lambda) * r, with sigma the normalized
/// score in [-1,1].
double esg_valued_return(double r, double sigma, const EsgBlendParams& p);

/// Riskless rate blended with the maximum normalized score (+1).
double esg_valued_riskless(double rf, const EsgBlendParams& p);

/// Applies esg_valued_return to every scenario (row) of an S x I matrix using
/// the per-asset score vector. Throws ShapeError on a length mismatch.
Eigen::MatrixXd blend_scenarios(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& scores,
                                const EsgBlendParams& p);

}  // namespace esgport
