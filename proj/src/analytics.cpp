#include "esgport/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "esgport/error.hpp"

namespace esgport {

namespace {

std::size_t tail_count(std::size_t n, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
    const double k = (1.0 - beta) * static_cast<double>(n);
    if (n == 0 || k < 1.0 - 1e-9)
        throw SampleTooSmall("tail measure needs at least 1/(1-beta) observations, got " + std::to_string(n));
    return std::min(n, static_cast<std::size_t>(std::ceil(k - 1e-9)));
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_of(std::span<const double> x) {
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
}

std::vector<double> excess(std::span<const double> series, std::span<const double> rate) {
    if (rate.size() != series.size()) throw ShapeError("rate series length does not match the return series");
    std::vector<double> e(series.size());
    for (std::size_t t = 0; t < e.size(); ++t) e[t] = series[t] - rate[t];
    return e;
}

}  // namespace

double etl(std::span<const double> x, double beta) {
    const std::size_t k = tail_count(x.size(), beta);
    std::vector<double> v(x.begin(), x.end());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += v[i];
    return s / static_cast<double>(k);
}

double etr(std::span<const double> x, double beta) {
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    return -etl(neg, beta);
}

double max_drawdown(std::span<const double> prices) {
    if (prices.empty()) throw SampleTooSmall("drawdown of an empty series");
    double peak = prices[0];
    double mdd = 0.0;
    for (double p : prices) {
        if (!(p > 0.0)) throw DomainError("drawdown needs positive prices");
        peak = std::max(peak, p);
        mdd = std::max(mdd, (peak - p) / peak);
    }
    return mdd;
}

double star_ratio(std::span<const double> series, std::span<const double> rate, double beta) {
    const auto e = excess(series, rate);
    const double tail = etl(e, beta);
    if (tail == 0.0) throw ZeroDenominator("STAR ratio: expected tail loss of the excess return is zero");
    return mean_of(e) / std::abs(tail);
}

double star_ratio(RiskFreeBasis basis, std::span<const double> series, std::span<const double> riskless_rate,
                  double beta, const EsgBlendParams& p) {
    if (basis == RiskFreeBasis::Fixed) return star_ratio(series, riskless_rate, beta);
    std::vector<double> zf(riskless_rate.size());
    for (std::size_t t = 0; t < zf.size(); ++t) zf[t] = esg_valued_riskless(riskless_rate[t], p);
    return star_ratio(series, zf, beta);
}

double gini_mean_difference(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * v[i];
    return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

RatioSuite rrr_suite(std::span<const double> series, std::span<const double> rate, double beta) {
    if (series.size() < 30) throw SampleTooSmall("ratio suite needs at least 30 observations");
    RatioSuite out;
    const double m = mean_of(series);
    double scale = 0.0;
    for (double v : series) scale = std::max(scale, std::abs(v));
    auto ratio = [&](std::optional<double>& slot, const char* name, double num, double den) {
        if (!(den > 1e-12 * scale) || !std::isfinite(den))
            out.errors.push_back(std::string("ZeroDenominator: ") + name);
        else
            slot = num / den;
    };
    ratio(out.sharpe, "sharpe", m, std_of(series));
    double down = 0.0;
    for (double v : series) down += std::min(v, 0.0) * std::min(v, 0.0);
    ratio(out.sortino, "sortino", m, std::sqrt(down / static_cast<double>(series.size())));
    try {
        out.star = star_ratio(series, rate, beta);
    } catch (const ZeroDenominator&) {
        out.errors.push_back("ZeroDenominator: star");
    }
    ratio(out.rachev, "rachev", etr(series, beta), std::abs(etl(series, beta)));
    ratio(out.gini, "gini", m, gini_mean_difference(series));
    return out;
}

MomentSummary moments(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) throw SampleTooSmall("moments need at least 4 observations");
    MomentSummary s;
    s.mean = mean_of(x);
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double xi : x) {
        const double d = xi - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    s.std = std::sqrt(m2 / (nd - 1.0));
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    if (m2 == 0.0) {
        s.skew = s.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    const double g1 = m3 / std::pow(m2, 1.5);
    const double g2 = m4 / (m2 * m2) - 3.0;
    s.skew = g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
    s.excess_kurtosis = ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
    return s;
}

double avg_turnover(const Eigen::MatrixXd& w) {
    if (w.rows() < 2) throw SampleTooSmall("turnover needs at least two dates");
    double total = 0.0;
    for (Eigen::Index t = 1; t < w.rows(); ++t) total += (w.row(t) - w.row(t - 1)).lpNorm<1>();
    return total / static_cast<double>(w.rows() - 1);
}

PerformanceSummary summarize_performance(std::span<const double> log_returns, std::span<const double> esg_score,
                                         double turnover, double beta, double c) {
    if (log_returns.empty()) throw SampleTooSmall("empty return series");
    PerformanceSummary s;
    std::vector<double> price(log_returns.size() + 1);
    price[0] = 1.0;
    double cum = 0.0;
    for (std::size_t t = 0; t < log_returns.size(); ++t) {
        cum += log_returns[t];
        price[t + 1] = std::exp(cum);
    }
    s.tot_ret = std::expm1(cum);
    s.ann_ret = std::pow(1.0 + s.tot_ret, c / static_cast<double>(log_returns.size())) - 1.0;
    s.avg_turnover = turnover;
    s.etl = etl(log_returns, beta);
    s.etr = etr(log_returns, beta);
    s.mdd = max_drawdown(price);
    if (!esg_score.empty()) {
        s.esg_avg = mean_of(esg_score);
        s.esg_std = std_of(esg_score);
    }
    return s;
}

}  // namespace esgport
