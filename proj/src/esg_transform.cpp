#include "esgport/esg_transform.hpp"

#include <cmath>
#include <string>

#include "esgport/error.hpp"

namespace esgport {

void EsgBlendParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda " + std::to_string(lambda) + " outside [0,1]");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale c must be positive and finite");
}

double esg_valued_return(double r, double sigma, const EsgBlendParams& p) {
    p.validate();
    if (!(sigma >= -1.0 && sigma <= 1.0))
        throw DomainError("normalized score " + std::to_string(sigma) + " outside [-1,1]");
    return p.lambda * sigma / p.c + (1.0 - p.lambda) * r;
}

double esg_valued_riskless(double rf, const EsgBlendParams& p) {
    p.validate();
    return p.lambda * (1.0 / p.c) + (1.0 - p.lambda) * rf;
}

Eigen::MatrixXd blend_scenarios(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& scores,
                                const EsgBlendParams& p) {
    p.validate();
    if (scores.size() != scenarios.cols())
        throw ShapeError("score vector has " + std::to_string(scores.size()) + " entries for " +
                         std::to_string(scenarios.cols()) + " assets");
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (!(scores(i) >= -1.0 && scores(i) <= 1.0))
            throw DomainError("normalized score outside [-1,1]");
    Eigen::MatrixXd out(scenarios.rows(), scenarios.cols());
    for (Eigen::Index i = 0; i < scenarios.cols(); ++i) {
        const double shift = p.lambda * scores(i) / p.c;
        const double scale = 1.0 - p.lambda;
        for (Eigen::Index s = 0; s < scenarios.rows(); ++s) out(s, i) = shift + scale * scenarios(s, i);
    }
    return out;
}

}  // namespace esgport
