#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "esgport/dates.hpp"
#include "esgport/esg_transform.hpp"
#include "esgport/market_data.hpp"
#include "esgport/optimizer.hpp"

namespace esgport {

/// Per-asset scores on both scales.
struct AssetScores {
    Eigen::VectorXd raw;         // [0,100]
    Eigen::VectorXd normalized;  // [-1,1]

    static AssetScores from_raw(const Eigen::VectorXd& raw, const NormalizationMap& map = {});
};

/// One optimal portfolio on a (lambda, alpha) frontier.
///
/// `risk_z` / `risk_r` are the risk coordinates of the measure that was
/// optimized: the standard deviation for mean-variance, CVaR for mean-CVaR.
/// Both standard deviation and CVaR are reported in each space regardless.
struct FrontierPoint {
    double lambda = 0.0;
    double alpha = 0.0;
    Eigen::VectorXd weights;
    SolveStatus status = SolveStatus::NumericLimit;
    std::string message;

    double mean_z = 0.0, risk_z = 0.0, std_z = 0.0, cvar_z = 0.0;
    double mean_r = 0.0, risk_r = 0.0, std_r = 0.0, cvar_r = 0.0;
    double esg_star = 0.0;    // sum theta_i ESG_i on the raw scale
    double sigma_star = 0.0;  // sum theta_i sigma_i
};

/// Coordinates of `weights` against raw scenarios R and their blend Z.
FrontierPoint evaluate_point(const Eigen::MatrixXd& raw_scenarios, const Eigen::MatrixXd& blended,
                             const AssetScores& scores, const Eigen::VectorXd& weights, const EsgBlendParams& p,
                             const OptimizationSpec& spec);

/// Blend, sweep alpha, and evaluate every point in both spaces.
std::vector<FrontierPoint> build_frontier(const Eigen::MatrixXd& raw_scenarios, const AssetScores& scores,
                                          const EsgBlendParams& p, std::span<const double> alpha_grid,
                                          const OptimizationSpec& spec);

struct TangentResult {
    FrontierPoint point;
    std::size_t index = 0;
    double zeta_f = 0.0;
    double slope = 0.0;
    /// True when even the best point earns less than zeta_f.
    bool below_riskless = false;
};

/// Frontier point with the steepest line from (0, zeta_f) in (risk_z, mean_z).
/// Ties go to the smaller risk. Points that are not Optimal or have
/// non-positive risk are skipped; throws NoTangent when none remain.
TangentResult tangent_portfolio(std::span<const FrontierPoint> frontier, double zeta_f);

/// Portfolio weights chosen at the close of each date.
struct WeightSchedule {
    std::vector<Date> dates;
    Eigen::MatrixXd weights;  // one row per date
};

/// Realized out-of-sample path. Entry k belongs to dates[k], the trading day
/// after the k-th decision date.
struct RealizedSeries {
    std::vector<Date> dates;
    Eigen::VectorXd realized_r;
    Eigen::VectorXd realized_z;
    Eigen::VectorXd price;      // p0 * exp(cumsum realized_r)
    Eigen::VectorXd esg_price;  // exp(cumsum realized_z)
    Eigen::VectorXd esg_score;  // raw-scale portfolio score
    Eigen::VectorXd sigma_star;
};

/// Applies weights decided on date t to the returns and scores of the next
/// calendar date. `daily_scores` is a filled panel whose tickers match
/// `returns`. `cost_log`, when given, holds one log(1 - cost) per decision and
/// is added to realized_r and, scaled by (1 - lambda), to realized_z.
/// Throws AlignmentError on a date or ticker mismatch.
RealizedSeries realize_series(const WeightSchedule& schedule, const ReturnPanel& returns,
                              const EsgPanel& daily_scores, const EsgBlendParams& p, double p0 = 1.0,
                              const Eigen::VectorXd* cost_log = nullptr);

}  // namespace esgport
