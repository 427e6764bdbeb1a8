#include "esgport/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "csv.hpp"
#include "esgport/error.hpp"

namespace esgport {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Date parse_date_at(const std::string& s, const std::string& path, std::size_t line) {
    try {
        return parse_date(s);
    } catch (const DomainError& e) {
        throw ParseError(path, line, e.what());
    }
}

}  // namespace

void TradingCalendar::validate() const {
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw CalendarError("calendar not strictly increasing at " + format_date(dates[i]));
}

std::ptrdiff_t TradingCalendar::index_of(Date d) const {
    const auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return -1;
    return it - dates.begin();
}

std::ptrdiff_t TradingCalendar::index_at_or_before(Date d) const {
    const auto it = std::upper_bound(dates.begin(), dates.end(), d);
    return (it - dates.begin()) - 1;
}

PricePanel load_prices(const std::string& path, const PriceLoadOptions& opts) {
    const auto rows = csv::read(path, 3);
    std::map<std::string, std::map<Date, double>> series;
    std::map<std::string, Date> last_seen;
    std::set<Date> all_dates;
    for (const auto& row : rows) {
        const Date d = parse_date_at(row.fields[0], path, row.line);
        const std::string& ticker = row.fields[1];
        if (ticker.empty()) throw ParseError(path, row.line, "empty ticker");
        const double close = csv::to_double(row.fields[2], path, row.line);
        if (!(close > 0.0) || !std::isfinite(close))
            throw ParseError(path, row.line, "price must be positive and finite");
        if (auto it = last_seen.find(ticker); it != last_seen.end() && !(it->second < d))
            throw CalendarError(path + ":" + std::to_string(row.line) + ": dates for " + ticker +
                                " are not strictly increasing at " + format_date(d));
        last_seen[ticker] = d;
        series[ticker][d] = close;
        all_dates.insert(d);
    }
    if (series.empty()) throw ParseError(path, 0, "no price rows");

    PricePanel panel;
    panel.calendar.dates.assign(all_dates.begin(), all_dates.end());
    const auto n_dates = panel.calendar.size();

    std::vector<std::pair<std::string, std::vector<double>>> kept;
    std::vector<std::vector<bool>> kept_filled;
    for (const auto& [ticker, obs] : series) {
        std::vector<double> col(n_dates, kNaN);
        std::vector<bool> filled(n_dates, false);
        std::string reason;
        int gap = 0;
        for (std::size_t t = 0; t < n_dates; ++t) {
            if (auto it = obs.find(panel.calendar.dates[t]); it != obs.end()) {
                col[t] = it->second;
                gap = 0;
                continue;
            }
            if (t == 0) {
                reason = "no price on first calendar date " + format_date(panel.calendar.dates[0]);
                break;
            }
            if (++gap > opts.max_gap) {
                reason = "more than " + std::to_string(opts.max_gap) + " consecutive missing dates ending " +
                         format_date(panel.calendar.dates[t]);
                break;
            }
            col[t] = col[t - 1];
            filled[t] = true;
        }
        if (!reason.empty()) {
            panel.rejected.push_back({ticker, reason});
            continue;
        }
        kept.emplace_back(ticker, std::move(col));
        kept_filled.push_back(std::move(filled));
    }

    panel.prices.resize(static_cast<Eigen::Index>(n_dates), static_cast<Eigen::Index>(kept.size()));
    panel.filled.resize(static_cast<Eigen::Index>(n_dates), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        panel.tickers.push_back(kept[j].first);
        for (std::size_t t = 0; t < n_dates; ++t) {
            panel.prices(t, j) = kept[j].second[t];
            panel.filled(t, j) = kept_filled[j][t];
        }
    }
    return panel;
}

ReturnPanel compute_returns(const PricePanel& prices) {
    const auto n = prices.prices.rows();
    if (n < 2) throw WindowTooShort("need at least 2 dates to compute returns");
    ReturnPanel out;
    out.tickers = prices.tickers;
    out.calendar.dates.assign(prices.calendar.dates.begin() + 1, prices.calendar.dates.end());
    const auto m = prices.prices.cols();
    out.returns.resize(n - 1, m);
    out.filled.resize(n - 1, m);
    for (Eigen::Index t = 1; t < n; ++t) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out.returns(t - 1, j) = std::log(prices.prices(t, j) / prices.prices(t - 1, j));
            out.filled(t - 1, j) = prices.filled(t, j) || prices.filled(t - 1, j);
        }
    }
    return out;
}

double NormalizationMap::operator()(double raw) const {
    if (!(raw >= 0.0 && raw <= 100.0))
        throw DomainError("ESG score " + std::to_string(raw) + " outside [0,100]");
    if (!(midpoint > 0.0 && midpoint < 100.0)) throw DomainError("normalization midpoint must lie in (0,100)");
    return raw <= midpoint ? (raw - midpoint) / midpoint : (raw - midpoint) / (100.0 - midpoint);
}

double NormalizationMap::inverse(double normalized) const {
    if (!(normalized >= -1.0 && normalized <= 1.0))
        throw DomainError("normalized score outside [-1,1]");
    return normalized <= 0.0 ? midpoint + normalized * midpoint
                             : midpoint + normalized * (100.0 - midpoint);
}

Eigen::MatrixXd normalize_scores(const Eigen::MatrixXd& raw, const NormalizationMap& map) {
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < raw.cols(); ++j)
            out(i, j) = std::isnan(raw(i, j)) ? kNaN : map(raw(i, j));
    return out;
}

std::ptrdiff_t EsgPanel::ticker_index(const std::string& ticker) const {
    const auto it = std::find(tickers.begin(), tickers.end(), ticker);
    return it == tickers.end() ? -1 : it - tickers.begin();
}

EsgPanel load_esg(const std::string& path, const NormalizationMap& map) {
    const auto rows = csv::read(path, 3);
    std::set<Date> dates;
    std::set<std::string> tickers;
    std::map<std::pair<std::string, Date>, double> cells;
    for (const auto& row : rows) {
        const Date d = parse_date_at(row.fields[0], path, row.line);
        const double score = csv::to_double(row.fields[2], path, row.line);
        if (!(score >= 0.0 && score <= 100.0))
            throw ParseError(path, row.line, "ESG score outside [0,100]");
        if (!cells.emplace(std::make_pair(row.fields[1], d), score).second)
            throw ParseError(path, row.line, "duplicate release for " + row.fields[1]);
        dates.insert(d);
        tickers.insert(row.fields[1]);
    }
    EsgPanel out;
    out.dates.assign(dates.begin(), dates.end());
    out.tickers.assign(tickers.begin(), tickers.end());
    out.raw = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(out.dates.size()),
                                        static_cast<Eigen::Index>(out.tickers.size()), kNaN);
    for (const auto& [key, score] : cells) {
        const auto i = std::lower_bound(out.dates.begin(), out.dates.end(), key.second) - out.dates.begin();
        const auto j = out.ticker_index(key.first);
        out.raw(i, j) = score;
    }
    out.normalized = normalize_scores(out.raw, map);
    return out;
}

EsgPanel fill_daily_scores(const EsgPanel& releases, const TradingCalendar& calendar) {
    EsgPanel out;
    out.dates = calendar.dates;
    out.tickers = releases.tickers;
    const auto n = static_cast<Eigen::Index>(calendar.size());
    const auto m = static_cast<Eigen::Index>(releases.tickers.size());
    out.raw.resize(n, m);
    out.normalized.resize(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        std::ptrdiff_t r = -1;  // latest release index <= current date
        std::ptrdiff_t last_valid = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            while (r + 1 < static_cast<std::ptrdiff_t>(releases.dates.size()) &&
                   releases.dates[r + 1] <= calendar.dates[t]) {
                ++r;
                if (!std::isnan(releases.raw(r, j))) last_valid = r;
            }
            if (last_valid < 0)
                throw NoScoreError("no ESG release for " + releases.tickers[j] + " on or before " +
                                   format_date(calendar.dates[t]));
            out.raw(t, j) = releases.raw(last_valid, j);
            out.normalized(t, j) = releases.normalized(last_valid, j);
        }
    }
    return out;
}

EsgPanel select_tickers(const EsgPanel& esg, const std::vector<std::string>& tickers) {
    EsgPanel out;
    out.dates = esg.dates;
    out.tickers = tickers;
    out.raw.resize(esg.raw.rows(), static_cast<Eigen::Index>(tickers.size()));
    out.normalized.resize(esg.raw.rows(), static_cast<Eigen::Index>(tickers.size()));
    for (std::size_t j = 0; j < tickers.size(); ++j) {
        const auto src = esg.ticker_index(tickers[j]);
        if (src < 0) throw NoScoreError("no ESG scores for " + tickers[j]);
        out.raw.col(j) = esg.raw.col(src);
        out.normalized.col(j) = esg.normalized.col(src);
    }
    return out;
}

YieldSeries load_yields(const std::string& path, double c) {
    if (!(c > 0.0)) throw DomainError("scale c must be positive");
    const auto rows = csv::read(path, 2);
    YieldSeries out;
    std::vector<double> ys;
    for (const auto& row : rows) {
        const Date d = parse_date_at(row.fields[0], path, row.line);
        if (!out.calendar.dates.empty() && !(out.calendar.dates.back() < d))
            throw CalendarError(path + ":" + std::to_string(row.line) + ": yield dates not strictly increasing");
        const double y = csv::to_double(row.fields[1], path, row.line);
        if (!std::isfinite(y)) throw ParseError(path, row.line, "non-finite yield");
        out.calendar.dates.push_back(d);
        ys.push_back(y);
    }
    out.annual_yield = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    out.daily_rate = out.annual_yield / c;
    return out;
}

YieldSeries align_yields(const YieldSeries& y, const TradingCalendar& calendar) {
    YieldSeries out;
    out.calendar = calendar;
    const auto n = static_cast<Eigen::Index>(calendar.size());
    out.annual_yield.resize(n);
    out.daily_rate.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto k = y.calendar.index_at_or_before(calendar.dates[t]);
        if (k < 0) throw AlignmentError("no yield on or before " + format_date(calendar.dates[t]));
        out.annual_yield(t) = y.annual_yield(k);
        out.daily_rate(t) = y.daily_rate(k);
    }
    return out;
}

}  // namespace esgport
