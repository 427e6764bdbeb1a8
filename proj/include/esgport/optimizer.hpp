#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esgport/esg_transform.hpp"

namespace esgport {

enum class RiskMeasure { MeanVariance, MeanCvar };

const char* to_string(RiskMeasure r) noexcept;
RiskMeasure parse_risk_measure(const std::string& s);

/// Reward-risk program
///
///     min  -alpha * mean(theta) + (1 - alpha) * risk(theta)
///     s.t. sum(theta) = 1,  theta >= 0 unless allow_short,
///          sum |theta - prev_weights| <= gamma  when gamma is set.
struct OptimizationSpec {
    double alpha = 0.5;
    RiskMeasure risk = RiskMeasure::MeanCvar;
    double beta = 0.99;
    std::optional<double> gamma;
    /// Reference portfolio for the turnover cap and for breaking ties. May be
    /// empty when no cap is set.
    Eigen::VectorXd prev_weights;
    bool allow_short = false;

    /// Throws DomainError / ShapeError for out-of-range fields.
    void validate(Eigen::Index assets) const;
};

enum class SolveStatus { Optimal, Infeasible, NumericLimit };

const char* to_string(SolveStatus s) noexcept;

struct SolveReport {
    Eigen::VectorXd weights;
    double objective = 0.0;
    SolveStatus status = SolveStatus::NumericLimit;
    int iterations = 0;
    /// Primal minus dual objective at termination.
    double duality_gap = 0.0;
    /// theta' mu at the solution.
    double mean = 0.0;
    /// Variance for MeanVariance, CVaR of the loss for MeanCvar.
    double risk = 0.0;
    std::vector<std::string> warnings;
};

/// Sample CVaR_beta of the loss -x: the Rockafellar-Uryasev value
/// min_xi xi + sum((-x - xi)^+) / (S (1 - beta)).
double sample_cvar(const Eigen::Ref<const Eigen::VectorXd>& x, double beta);

/// Mean-variance quadratic program, solved by a primal-dual interior point
/// method. A negative-definite Sigma is clipped to PSD and ridged.
SolveReport solve_mv(const Eigen::VectorXd& mu, const Eigen::MatrixXd& Sigma, const OptimizationSpec& spec);

/// Mean-CVaR linear program over S x I scenarios. The Rockafellar-Uryasev
/// linearization has S + I + 1 variables; its dual has only I + 1 rows (3I + 1
/// with a turnover cap), so the dual is solved by a bounded revised simplex and
/// the weights are read off its multipliers.
SolveReport solve_mcvar(const Eigen::MatrixXd& scenarios, const OptimizationSpec& spec);

/// Dispatches on spec.risk. MeanVariance uses the scenario mean and sample
/// covariance.
SolveReport solve(const Eigen::MatrixXd& scenarios, const OptimizationSpec& spec);

/// One solve per alpha, in grid order. A failing point is reported with
/// status NumericLimit and the error text in its warnings; the sweep goes on.
std::vector<SolveReport> sweep_alpha(const Eigen::MatrixXd& scenarios, std::span<const double> alpha_grid,
                                     const OptimizationSpec& spec_template);

/// Blends raw scenarios with the scores at `params` first.
std::vector<SolveReport> sweep_alpha(const Eigen::MatrixXd& raw_scenarios, const Eigen::VectorXd& scores,
                                     const EsgBlendParams& params, std::span<const double> alpha_grid,
                                     const OptimizationSpec& spec_template);

/// a, a+step, ..., up to b inclusive (with a small tolerance on the end point).
std::vector<double> make_grid(double a, double step, double b);

}  // namespace esgport
