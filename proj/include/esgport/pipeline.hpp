#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esgport/analytics.hpp"
#include "esgport/frontier.hpp"
#include "esgport/market_data.hpp"
#include "esgport/nig.hpp"
#include "esgport/optimizer.hpp"
#include "esgport/scenario_engine.hpp"

namespace esgport {

struct DataPaths {
    std::string prices;
    std::string esg;
    std::string yields;  // optional
};

/// Everything the commands need, aligned on the return calendar.
struct MarketData {
    PricePanel prices;
    ReturnPanel returns;
    EsgPanel daily_scores;              // on returns.calendar, tickers match returns
    std::optional<YieldSeries> yields;  // on returns.calendar
};

MarketData load_market(const DataPaths& paths, const PriceLoadOptions& price_opts = {},
                       const NormalizationMap& map = {}, double c = 255.0);

/// Per-asset ARMA-GARCH fits and the joint NIG of their standardized
/// residuals over one estimation window.
struct ScenarioModel {
    std::vector<ArmaGarchFit> fits;
    NigFitReport nig;
};

/// Fits the window of `window` returns ending at row `end` (inclusive).
ScenarioModel fit_window(const ReturnPanel& returns, std::size_t end, std::size_t window,
                         const FitOptions& fit_opts = {}, const NigFitOptions& nig_opts = {});

/// One-dimensional model of a fixed-weight portfolio's historical returns.
struct UnderlyingModel {
    ArmaGarchFit fit;
    NigParams nig;
};

/// ARMA-GARCH on w'r over the window ending at row `end`, then a NIG fit of its
/// standardized residuals.
UnderlyingModel fit_underlying(const ReturnPanel& returns, std::size_t end, std::size_t window,
                               const Eigen::VectorXd& w, const FitOptions& opts = {});

/// Seed of the scenario draw for calendar row `t`.
std::uint64_t day_seed(std::uint64_t seed, std::size_t t) noexcept;

struct BacktestSettings {
    std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75};
    double alpha = 0.7;
    RiskMeasure risk = RiskMeasure::MeanCvar;
    double beta = 0.99;
    std::size_t window = 510;
    std::size_t scenarios = 10000;
    std::optional<double> gamma = 0.004;
    double cost_bps = 2.0;
    std::uint64_t seed = 42;
    double c = 255.0;
    /// First and last decision dates; default to the whole usable range.
    std::optional<Date> start;
    std::optional<Date> end;
    /// Weights of the fixed-weight index benchmark; empty means 1/I.
    Eigen::VectorXd index_weights;
};

struct StrategyResult {
    std::string name;
    double lambda = 0.0;
    RealizedSeries series;
    Eigen::MatrixXd weights;   // decision weights, one row per decision date
    Eigen::VectorXd turnover;  // sum |theta_t - drifted theta|, first entry the initial purchase
    Eigen::VectorXd cost_log;  // log(1 - cost) charged to the next period
    std::vector<std::string> warnings;
};

struct BacktestResult {
    std::vector<Date> decision_dates;
    std::vector<StrategyResult> strategies;  // optimized per lambda, then EWBH and INDEX per lambda
    std::vector<std::string> tickers;
};

/// Daily rolling re-optimization at a fixed alpha for every lambda. The
/// models are fitted once per date and shared by all lambdas.
BacktestResult run_backtest(const MarketData& data, const BacktestSettings& settings);

/// Average turnover over the rebalancing dates (the initial purchase excluded).
double rebalancing_turnover(const StrategyResult& s);

}  // namespace esgport
