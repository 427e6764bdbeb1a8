#include "esgport/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "esgport/error.hpp"

namespace esgport {

MarketData load_market(const DataPaths& paths, const PriceLoadOptions& price_opts, const NormalizationMap& map,
                       double c) {
    MarketData md;
    md.prices = load_prices(paths.prices, price_opts);
    if (md.prices.tickers.empty()) throw AlignmentError("no usable asset in " + paths.prices);
    md.returns = compute_returns(md.prices);
    if (md.returns.periods() < 2) throw WindowTooShort("price file holds fewer than three dates");
    const auto releases = select_tickers(load_esg(paths.esg, map), md.returns.tickers);
    md.daily_scores = fill_daily_scores(releases, md.returns.calendar);
    if (!paths.yields.empty()) md.yields = align_yields(load_yields(paths.yields, c), md.returns.calendar);
    return md;
}

ScenarioModel fit_window(const ReturnPanel& returns, std::size_t end, std::size_t window, const FitOptions& fit_opts,
                         const NigFitOptions& nig_opts) {
    if (end >= returns.periods()) throw DomainError("window end beyond the return panel");
    if (end + 1 < window) throw WindowTooShort("not enough history for a window of " + std::to_string(window));
    const auto first = static_cast<Eigen::Index>(end + 1 - window);
    const auto I = static_cast<Eigen::Index>(returns.assets());
    ScenarioModel m;
    m.fits.reserve(returns.assets());
    std::vector<double> col(window);
    for (Eigen::Index i = 0; i < I; ++i) {
        for (std::size_t k = 0; k < window; ++k) col[k] = returns.returns(first + static_cast<Eigen::Index>(k), i);
        m.fits.push_back(fit_arma_garch(col, {}, fit_opts));
    }
    const auto rows = static_cast<Eigen::Index>(m.fits.front().standardized_residuals.size());
    Eigen::MatrixXd z(rows, I);
    for (Eigen::Index i = 0; i < I; ++i) {
        const auto& e = m.fits[static_cast<std::size_t>(i)].standardized_residuals;
        if (static_cast<Eigen::Index>(e.size()) != rows) throw ShapeError("residual lengths differ across assets");
        z.col(i) = Eigen::Map<const Eigen::VectorXd>(e.data(), rows);
    }
    m.nig = fit_joint_nig(z, nig_opts);
    return m;
}

UnderlyingModel fit_underlying(const ReturnPanel& returns, std::size_t end, std::size_t window,
                               const Eigen::VectorXd& w, const FitOptions& opts) {
    if (end >= returns.periods()) throw DomainError("window end beyond the return panel");
    if (end + 1 < window) throw WindowTooShort("not enough history for a window of " + std::to_string(window));
    if (w.size() != static_cast<Eigen::Index>(returns.assets())) throw ShapeError("weights do not match the assets");
    const auto first = static_cast<Eigen::Index>(end + 1 - window);
    const Eigen::VectorXd series = returns.returns.middleRows(first, static_cast<Eigen::Index>(window)) * w;
    UnderlyingModel m;
    m.fit = fit_arma_garch(std::span<const double>(series.data(), static_cast<std::size_t>(series.size())), {}, opts);
    const auto& e = m.fit.standardized_residuals;
    const Eigen::MatrixXd z = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
    m.nig = fit_joint_nig(z).params;
    return m;
}

std::uint64_t day_seed(std::uint64_t seed, std::size_t t) noexcept {
    // splitmix64 finalizer over (seed, t)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(t) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

Eigen::VectorXd drift(const Eigen::VectorXd& w, const Eigen::VectorXd& log_returns) {
    Eigen::VectorXd v = w.array() * log_returns.array().exp();
    const double s = v.sum();
    return s > 0.0 ? Eigen::VectorXd(v / s) : w;
}

struct Tracker {
    StrategyResult result;
    Eigen::VectorXd held;  // drifted weights entering the current date
    bool started = false;
};

void init_tracker(Tracker& tr, std::string name, double lambda, std::size_t n, Eigen::Index I) {
    tr.result.name = std::move(name);
    tr.result.lambda = lambda;
    tr.result.weights.resize(static_cast<Eigen::Index>(n), I);
    tr.result.turnover.resize(static_cast<Eigen::Index>(n));
    tr.result.cost_log.resize(static_cast<Eigen::Index>(n));
}

void record(Tracker& tr, std::size_t k, const Eigen::VectorXd& w, double cost_rate, const Eigen::VectorXd& next_r) {
    const auto ek = static_cast<Eigen::Index>(k);
    const double traded = tr.started ? (w - tr.held).cwiseAbs().sum() : w.cwiseAbs().sum();
    tr.result.weights.row(ek) = w.transpose();
    tr.result.turnover(ek) = traded;
    tr.result.cost_log(ek) = std::log1p(-cost_rate * traded);
    tr.held = drift(w, next_r);
    tr.started = true;
}

}  // namespace

BacktestResult run_backtest(const MarketData& data, const BacktestSettings& s) {
    const auto& panel = data.returns;
    const std::size_t T = panel.periods();
    const auto I = static_cast<Eigen::Index>(panel.assets());
    if (s.window < 20) throw ConfigError("backtest window must be at least 20");
    if (s.lambdas.empty()) throw ConfigError("no lambda to backtest");
    for (double l : s.lambdas) EsgBlendParams{l, s.c}.validate();
    if (!(s.cost_bps >= 0.0) || s.cost_bps >= 1e4) throw ConfigError("cost_bps must lie in [0, 10000)");
    if (s.index_weights.size() != 0 && s.index_weights.size() != I)
        throw ConfigError("index weights do not match the asset count");

    std::size_t first = s.window - 1;
    std::size_t last = T >= 2 ? T - 2 : 0;
    if (s.start) {
        const auto idx = panel.calendar.index_at_or_before(*s.start);
        const auto at = idx >= 0 && panel.calendar.dates[static_cast<std::size_t>(idx)] == *s.start ? idx : idx + 1;
        first = std::max(first, static_cast<std::size_t>(std::max<std::ptrdiff_t>(at, 0)));
    }
    if (s.end) {
        const auto idx = panel.calendar.index_at_or_before(*s.end);
        if (idx < 0) throw ConfigError("backtest end precedes the data");
        last = std::min(last, static_cast<std::size_t>(idx));
    }
    if (T < s.window + 1 || first > last)
        throw WindowTooShort("history does not cover the estimation window plus one trading day");

    const std::size_t n = last - first + 1;
    BacktestResult out;
    out.tickers = panel.tickers;
    for (std::size_t t = first; t <= last; ++t) out.decision_dates.push_back(panel.calendar.dates[t]);

    const std::size_t L = s.lambdas.size();
    std::vector<Tracker> opt(L), ewbh(L), index(L);
    Eigen::VectorXd index_w = s.index_weights.size() ? s.index_weights : Eigen::VectorXd::Constant(I, 1.0 / I);
    index_w /= index_w.sum();
    for (std::size_t l = 0; l < L; ++l) {
        init_tracker(opt[l], "optimized", s.lambdas[l], n, I);
        init_tracker(ewbh[l], "EWBH", s.lambdas[l], n, I);
        init_tracker(index[l], "INDEX", s.lambdas[l], n, I);
    }

    const double cost_rate = s.cost_bps * 1e-4;
    NigFitOptions nig_opts;
    FitOptions fit_opts;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = first + k;
        fit_opts.seed = day_seed(s.seed ^ 0xa5a5a5a5ull, t);
        const auto model = fit_window(panel, t, s.window, fit_opts, nig_opts);
        nig_opts.initial = model.nig.params;
        const auto scen = simulate_one_step(model.fits, model.nig.params, s.scenarios, day_seed(s.seed, t));
        const Eigen::VectorXd next_r = panel.returns.row(static_cast<Eigen::Index>(t) + 1).transpose();
        const Eigen::VectorXd score = data.daily_scores.normalized.row(static_cast<Eigen::Index>(t)).transpose();

        for (std::size_t l = 0; l < L; ++l) {
            auto& tr = opt[l];
            const Eigen::MatrixXd Z = blend_scenarios(scen.values, score, {s.lambdas[l], s.c});
            OptimizationSpec spec;
            spec.alpha = s.alpha;
            spec.risk = s.risk;
            spec.beta = s.beta;
            if (tr.started) {
                spec.gamma = s.gamma;
                spec.prev_weights = tr.held;
            }
            Eigen::VectorXd w;
            try {
                const auto rep = solve(Z, spec);
                if (rep.status == SolveStatus::Optimal) {
                    w = rep.weights;
                } else {
                    tr.result.warnings.push_back(format_date(panel.calendar.dates[t]) + ": " + to_string(rep.status));
                }
            } catch (const Error& e) {
                tr.result.warnings.push_back(format_date(panel.calendar.dates[t]) + ": " + e.kind() + ": " + e.what());
            }
            if (w.size() == 0) w = tr.started ? tr.held : Eigen::VectorXd::Constant(I, 1.0 / I);
            record(tr, k, w, cost_rate, next_r);

            record(ewbh[l], k, ewbh[l].started ? ewbh[l].held : Eigen::VectorXd::Constant(I, 1.0 / I), 0.0, next_r);
            record(index[l], k, index_w, 0.0, next_r);
        }
    }

    WeightSchedule sched;
    sched.dates = out.decision_dates;
    for (auto* group : {&opt, &ewbh, &index}) {
        for (std::size_t l = 0; l < L; ++l) {
            auto& tr = (*group)[l];
            sched.weights = tr.result.weights;
            const bool costs = group == &opt;
            tr.result.series = realize_series(sched, panel, data.daily_scores, {s.lambdas[l], s.c}, 1.0,
                                              costs ? &tr.result.cost_log : nullptr);
            out.strategies.push_back(std::move(tr.result));
        }
    }
    return out;
}

double rebalancing_turnover(const StrategyResult& s) {
    const auto n = s.turnover.size();
    return n > 1 ? s.turnover.tail(n - 1).mean() : 0.0;
}

}  // namespace esgport
