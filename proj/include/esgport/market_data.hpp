#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esgport/dates.hpp"

namespace esgport {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Strictly increasing list of business dates.
struct TradingCalendar {
    std::vector<Date> dates;

    std::size_t size() const noexcept { return dates.size(); }
    /// Throws CalendarError unless dates are strictly increasing.
    void validate() const;
    /// Index of `d`, or -1 when absent.
    std::ptrdiff_t index_of(Date d) const;
    /// Index of the last date <= d, or -1.
    std::ptrdiff_t index_at_or_before(Date d) const;
};

struct RejectedAsset {
    std::string ticker;
    std::string reason;
};

/// Closing prices, one row per calendar date and one column per ticker.
/// Cells absent from the source file are forward-filled and flagged.
struct PricePanel {
    TradingCalendar calendar;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;
    BoolMatrix filled;
    std::vector<RejectedAsset> rejected;
};

/// Daily log returns; row t is ln(P[t]/P[t-1]) for calendar date t.
struct ReturnPanel {
    TradingCalendar calendar;
    std::vector<std::string> tickers;
    Eigen::MatrixXd returns;
    BoolMatrix filled;

    std::size_t assets() const noexcept { return tickers.size(); }
    std::size_t periods() const noexcept { return calendar.size(); }
};

/// Monotone map from raw [0,100] scores to [-1,1]. Scores below the midpoint
/// map linearly onto [-1,0), scores above onto (0,1]. The default midpoint of
/// 50 gives the plain linear map raw/50 - 1.
struct NormalizationMap {
    double midpoint = 50.0;

    double operator()(double raw) const;
    double inverse(double normalized) const;
};

/// ESG scores indexed by date. For a release table `dates` are the release
/// dates and NaN marks "no release for this ticker on this date"; after
/// fill_daily_scores `dates` is a trading calendar and every cell is set.
struct EsgPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd raw;
    Eigen::MatrixXd normalized;

    std::ptrdiff_t ticker_index(const std::string& ticker) const;
};

/// Riskless yield on a calendar; daily_rate = annual_yield / c.
struct YieldSeries {
    TradingCalendar calendar;
    Eigen::VectorXd annual_yield;
    Eigen::VectorXd daily_rate;
};

struct PriceLoadOptions {
    /// Longest run of consecutive missing dates that is forward-filled.
    int max_gap = 5;
};

/// Reads a long-format CSV (date,ticker,close). Assets with a leading gap or a
/// run of more than `max_gap` missing dates are dropped into `rejected`.
PricePanel load_prices(const std::string& path, const PriceLoadOptions& opts = {});

ReturnPanel compute_returns(const PricePanel& prices);

/// Elementwise normalization; throws DomainError for raw outside [0,100].
Eigen::MatrixXd normalize_scores(const Eigen::MatrixXd& raw, const NormalizationMap& map = {});

/// Reads release_date,ticker,score0to100 rows into a release table.
EsgPanel load_esg(const std::string& path, const NormalizationMap& map = {});

/// Step-function fill: each calendar date carries the score of the latest
/// release on or before it. Throws NoScoreError when an asset has no release
/// on or before the first calendar date.
EsgPanel fill_daily_scores(const EsgPanel& releases, const TradingCalendar& calendar);

/// Reads date,annual_yield_decimal rows.
YieldSeries load_yields(const std::string& path, double c = 255.0);

/// Forward-fills a yield series onto `calendar` (the first date must be
/// covered by the series).
YieldSeries align_yields(const YieldSeries& y, const TradingCalendar& calendar);

/// Selects and reorders ESG columns to match `tickers`. Throws NoScoreError
/// for a ticker without scores.
EsgPanel select_tickers(const EsgPanel& esg, const std::vector<std::string>& tickers);

}  // namespace esgport
