#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esgport/esg_transform.hpp"

namespace esgport {

/// Expected tail loss: mean of the ceil((1-beta) n) smallest observations.
/// Negative for a loss. Throws SampleTooSmall when (1-beta) n < 1.
double etl(std::span<const double> x, double beta);

/// Expected tail return, -etl(-x).
double etr(std::span<const double> x, double beta);

/// Largest fall from a running peak, as a fraction of that peak.
double max_drawdown(std::span<const double> prices);

enum class RiskFreeBasis { Fixed, Esg };

/// mean(x - rate) / |ETL_beta(x - rate)|. Throws ZeroDenominator when the
/// tail is zero.
double star_ratio(std::span<const double> series, std::span<const double> rate, double beta);

/// STAR against either the plain daily riskless rate or its ESG-valued blend
/// at `p`.
double star_ratio(RiskFreeBasis basis, std::span<const double> series, std::span<const double> riskless_rate,
                  double beta, const EsgBlendParams& p);

/// Reward-risk ratios on the raw series (STAR on the excess over `rate`). A
/// ratio whose denominator vanishes is left empty and noted in `errors`.
struct RatioSuite {
    std::optional<double> sharpe;
    std::optional<double> sortino;
    std::optional<double> star;
    std::optional<double> rachev;
    std::optional<double> gini;
    std::vector<std::string> errors;
};

/// Throws SampleTooSmall below 30 observations.
RatioSuite rrr_suite(std::span<const double> series, std::span<const double> rate, double beta);

/// Sample moments. Skewness and excess kurtosis use the bias-adjusted
/// estimators G1 and G2; both are NaN for a constant series.
struct MomentSummary {
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0;
    double skew = 0.0;
    double excess_kurtosis = 0.0;
};

/// Throws SampleTooSmall below 4 observations.
MomentSummary moments(std::span<const double> x);

/// Mean over t >= 1 of sum_i |w[t,i] - w[t-1,i]|; rows are dates.
double avg_turnover(const Eigen::MatrixXd& weights_by_date);

/// Mean over pairs of |x_i - x_j|.
double gini_mean_difference(std::span<const double> x);

/// All fields are fractions (tables print them as percent).
struct PerformanceSummary {
    double tot_ret = 0.0;
    double ann_ret = 0.0;
    double avg_turnover = 0.0;
    double etl = 0.0;
    double etr = 0.0;
    double mdd = 0.0;
    double esg_avg = 0.0;
    double esg_std = 0.0;
};

/// Summary of a daily log-return path starting from price 1.
/// ann_ret = (1 + tot_ret)^(c / n) - 1.
PerformanceSummary summarize_performance(std::span<const double> log_returns, std::span<const double> esg_score,
                                         double turnover, double beta, double c = 255.0);

}  // namespace esgport
