#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "esgport/analytics.hpp"
#include "esgport/error.hpp"
#include "esgport/frontier.hpp"
#include "esgport/option_pricer.hpp"
#include "esgport/pipeline.hpp"
#include "esgport/shadow_rate.hpp"
#include "json_io.hpp"

namespace esgport::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path) {
        if (!out_) throw FileError("cannot write '" + path.string() + "'");
    }
    CsvWriter& operator<<(const std::string& field) {
        if (!first_) out_ << ',';
        out_ << field;
        first_ = false;
        return *this;
    }
    CsvWriter& operator<<(double v) { return *this << num(v); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write '" + path.string() + "'");
    out << text;
}

fs::path command_dir(const RunConfig& cfg, const std::string& name) {
    const fs::path dir = fs::path(cfg.out_dir) / name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw FileError("cannot create '" + dir.string() + "': " + ec.message());
    write_text(dir / "config.json", config_to_json(cfg));
    return dir;
}

MarketData load(const RunConfig& cfg) {
    return load_market(cfg.data, {cfg.max_gap}, NormalizationMap{cfg.midpoint}, cfg.c);
}

std::size_t as_of_row(const MarketData& md, const RunConfig& cfg) {
    const auto& cal = md.returns.calendar;
    if (!cfg.as_of) return cal.size() - 1;
    const auto idx = cal.index_at_or_before(parse_date(*cfg.as_of));
    if (idx < 0) throw ConfigError("as_of date " + *cfg.as_of + " precedes the return history");
    return static_cast<std::size_t>(idx);
}

FitOptions fit_options(const RunConfig& cfg, std::size_t t) {
    FitOptions o;
    o.seed = day_seed(cfg.seed ^ 0xa5a5a5a5ull, t);
    return o;
}

struct FrontierRun {
    MarketData md;
    std::size_t t = 0;
    ScenarioModel model;
    ScenarioMatrix scenarios;
    AssetScores scores;
    std::vector<std::vector<FrontierPoint>> frontiers;  // per lambda
};

FrontierRun run_frontiers(const RunConfig& cfg) {
    FrontierRun run;
    run.md = load(cfg);
    run.t = as_of_row(run.md, cfg);
    run.model = fit_window(run.md.returns, run.t, cfg.window, fit_options(cfg, run.t));
    run.scenarios = simulate_one_step(run.model.fits, run.model.nig.params, cfg.scenarios, day_seed(cfg.seed, run.t));
    const auto row = static_cast<Eigen::Index>(run.t);
    run.scores.raw = run.md.daily_scores.raw.row(row).transpose();
    run.scores.normalized = run.md.daily_scores.normalized.row(row).transpose();
    const auto grid = cfg.alpha_grid.values();
    OptimizationSpec spec;
    spec.risk = cfg.risk;
    spec.beta = cfg.beta;
    for (double lambda : cfg.lambdas)
        run.frontiers.push_back(build_frontier(run.scenarios.values, run.scores, {lambda, cfg.c}, grid, spec));
    return run;
}

void write_model(const fs::path& path, const FrontierRun& run) {
    json j;
    j["date"] = format_date(run.md.returns.calendar.dates[run.t]);
    j["tickers"] = run.md.returns.tickers;
    j["fits"] = run.model.fits;
    j["nig"] = run.model.nig.params;
    j["nig_iterations"] = run.model.nig.iterations;
    j["nig_converged"] = run.model.nig.converged;
    j["scenario_seed"] = run.scenarios.seed;
    write_text(path, j.dump(2) + "\n");
}

void write_frontier(const fs::path& path, const std::vector<FrontierPoint>& points,
                    const std::vector<std::string>& tickers) {
    CsvWriter w(path);
    w << "lambda" << "alpha" << "status" << "mean_z" << "risk_z" << "std_z" << "cvar_z" << "mean_r" << "risk_r"
      << "std_r" << "cvar_r" << "esg_star" << "sigma_star";
    for (const auto& t : tickers) w << ("w_" + t);
    w << "message";
    w.end_row();
    for (const auto& p : points) {
        w << p.lambda << p.alpha << std::string(to_string(p.status)) << p.mean_z << p.risk_z << p.std_z << p.cvar_z
          << p.mean_r << p.risk_r << p.std_r << p.cvar_r << p.esg_star << p.sigma_star;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(tickers.size()); ++i)
            w << (i < p.weights.size() ? p.weights(i) : std::nan(""));
        std::string msg = p.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        w << msg;
        w.end_row();
    }
}

double riskless_rate(const MarketData& md, std::size_t t) {
    if (!md.yields) throw ConfigError("this command needs a yield file");
    return md.yields->daily_rate(static_cast<Eigen::Index>(t));
}

std::vector<TangentResult> tangents(const RunConfig& cfg, const FrontierRun& run) {
    const double rf = riskless_rate(run.md, run.t);
    std::vector<TangentResult> out;
    for (std::size_t l = 0; l < cfg.lambdas.size(); ++l)
        out.push_back(tangent_portfolio(run.frontiers[l], esg_valued_riskless(rf, {cfg.lambdas[l], cfg.c})));
    return out;
}

void write_tangents(const fs::path& path, const std::vector<TangentResult>& ts, const std::vector<std::string>& tickers) {
    CsvWriter w(path);
    w << "lambda" << "zeta_f" << "alpha" << "slope" << "below_riskless" << "mean_z" << "risk_z" << "mean_r" << "risk_r"
      << "esg_star" << "sigma_star";
    for (const auto& t : tickers) w << ("w_" + t);
    w.end_row();
    for (const auto& t : ts) {
        const auto& p = t.point;
        w << p.lambda << t.zeta_f << p.alpha << t.slope << std::string(t.below_riskless ? "true" : "false") << p.mean_z
          << p.risk_z << p.mean_r << p.risk_r << p.esg_star << p.sigma_star;
        for (Eigen::Index i = 0; i < p.weights.size(); ++i) w << p.weights(i);
        w.end_row();
    }
}

void write_surface(const fs::path& path, const OptionSurface& s) {
    CsvWriter w(path);
    w << "T" << "M" << "strike" << "call" << "put" << "iv_call" << "iv_put" << "iv_at_bound" << "parity_residual"
      << "error";
    w.end_row();
    for (const auto& c : s.cells) {
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        w << num(c.T) << c.M << c.strike << c.call << c.put << c.iv << c.iv << std::string(c.iv_at_bound ? "true" : "false")
          << c.parity_residual << err;
        w.end_row();
    }
}

void write_series(const fs::path& path, const StrategyResult& s, const std::vector<std::string>& tickers) {
    CsvWriter w(path);
    w << "date" << "realized_r" << "realized_z" << "price" << "esg_price" << "esg_score" << "sigma_star" << "turnover"
      << "cost_log";
    for (const auto& t : tickers) w << ("w_" + t);
    w.end_row();
    const auto& r = s.series;
    for (std::size_t k = 0; k < r.dates.size(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        w << format_date(r.dates[k]) << r.realized_r(e) << r.realized_z(e) << r.price(e) << r.esg_price(e)
          << r.esg_score(e) << r.sigma_star(e) << s.turnover(e) << s.cost_log(e);
        for (Eigen::Index i = 0; i < s.weights.cols(); ++i) w << s.weights(e, i);
        w.end_row();
    }
}

std::span<const double> span_of(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); }

}  // namespace

void ingest(const RunConfig& cfg) {
    const auto md = load(cfg);
    const auto dir = command_dir(cfg, "ingest");
    json j;
    j["tickers"] = md.returns.tickers;
    j["first_price_date"] = format_date(md.prices.calendar.dates.front());
    j["last_price_date"] = format_date(md.prices.calendar.dates.back());
    j["price_dates"] = md.prices.calendar.size();
    j["return_periods"] = md.returns.periods();
    auto rejected = json::array();
    for (const auto& r : md.prices.rejected) rejected.push_back({{"ticker", r.ticker}, {"reason", r.reason}});
    j["rejected"] = rejected;
    json filled = json::object();
    for (std::size_t i = 0; i < md.prices.tickers.size(); ++i)
        filled[md.prices.tickers[i]] = md.prices.filled.col(static_cast<Eigen::Index>(i)).count();
    j["filled_cells"] = filled;
    j["has_yields"] = md.yields.has_value();
    write_text(dir / "summary.json", j.dump(2) + "\n");

    CsvWriter r(dir / "returns.csv"), s(dir / "scores.csv");
    r << "date";
    s << "date";
    for (const auto& t : md.returns.tickers) {
        r << t;
        s << t;
    }
    r.end_row();
    s.end_row();
    for (std::size_t k = 0; k < md.returns.periods(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        const auto d = format_date(md.returns.calendar.dates[k]);
        r << d;
        s << d;
        for (Eigen::Index i = 0; i < md.returns.returns.cols(); ++i) {
            r << md.returns.returns(e, i);
            s << md.daily_scores.normalized(e, i);
        }
        r.end_row();
        s.end_row();
    }
    std::printf("ingested %zu assets over %zu return periods into %s\n", md.returns.assets(), md.returns.periods(),
                dir.string().c_str());
}

void frontier(const RunConfig& cfg) {
    const auto run = run_frontiers(cfg);
    const auto dir = command_dir(cfg, "frontier");
    for (std::size_t l = 0; l < cfg.lambdas.size(); ++l)
        write_frontier(dir / ("frontier_lambda_" + tag(cfg.lambdas[l]) + ".csv"), run.frontiers[l],
                       run.md.returns.tickers);
    write_model(dir / "model.json", run);
    std::printf("wrote %zu frontiers of %zu points for %s to %s\n", cfg.lambdas.size(), cfg.alpha_grid.values().size(),
                format_date(run.md.returns.calendar.dates[run.t]).c_str(), dir.string().c_str());
}

void tangent(const RunConfig& cfg) {
    const auto run = run_frontiers(cfg);
    const auto dir = command_dir(cfg, "tangent");
    for (std::size_t l = 0; l < cfg.lambdas.size(); ++l)
        write_frontier(dir / ("frontier_lambda_" + tag(cfg.lambdas[l]) + ".csv"), run.frontiers[l],
                       run.md.returns.tickers);
    write_tangents(dir / "tangent.csv", tangents(cfg, run), run.md.returns.tickers);
    std::printf("wrote tangent portfolios to %s\n", dir.string().c_str());
}

void price_options(const RunConfig& cfg) {
    const auto run = run_frontiers(cfg);
    const auto ts = tangents(cfg, run);
    const auto dir = command_dir(cfg, "options");
    const auto I = static_cast<Eigen::Index>(run.md.returns.assets());
    const int horizon = *std::max_element(cfg.maturities.begin(), cfg.maturities.end());
    const double rf = riskless_rate(run.md, run.t);
    SurfaceSpec spec;
    spec.maturities = cfg.maturities;
    spec.moneyness = cfg.moneyness.values();
    spec.c = cfg.c;
    const std::uint64_t seed = day_seed(cfg.seed ^ 0x0b710ull, run.t);

    Eigen::VectorXd index_w = Eigen::VectorXd::Constant(I, 1.0 / static_cast<double>(I));
    if (!cfg.index_weights.empty()) {
        if (static_cast<Eigen::Index>(cfg.index_weights.size()) != I)
            throw ConfigError("index weights do not match the asset count");
        index_w = Eigen::Map<const Eigen::VectorXd>(cfg.index_weights.data(), I);
        index_w /= index_w.sum();
    }
    const auto index_model = fit_underlying(run.md.returns, run.t, cfg.window, index_w, fit_options(cfg, run.t));
    const auto index_paths =
        simulate_trajectories(index_model.fit, index_model.nig, horizon, cfg.option_scenarios, seed);

    json summary = json::array();
    for (std::size_t l = 0; l < cfg.lambdas.size(); ++l) {
        const double lambda = cfg.lambdas[l];
        spec.zeta_f = esg_valued_riskless(rf, {lambda, cfg.c});

        const Eigen::VectorXd w = ts[l].point.weights;
        const auto model = fit_underlying(run.md.returns, run.t, cfg.window, w, fit_options(cfg, run.t));
        TrajectoryBlend blend{w.dot(run.scores.normalized), {lambda, cfg.c}, 1.0};
        const auto paths = simulate_trajectories(model.fit, model.nig, horizon, cfg.option_scenarios, seed, blend);
        const auto surface = price_surface(paths.esg_prices, 1.0, spec, lambda);
        write_surface(dir / ("surface_tangent_lambda_" + tag(lambda) + ".csv"), surface);

        TrajectoryBlend index_blend{index_w.dot(run.scores.normalized), {lambda, cfg.c}, 1.0};
        const auto index_surface =
            price_surface(esg_price_paths(index_paths.returns, index_blend), 1.0, spec, lambda);
        write_surface(dir / ("surface_index_lambda_" + tag(lambda) + ".csv"), index_surface);

        double worst_parity = 0.0, worst_martingale = 0.0;
        for (const auto* s : {&surface, &index_surface}) {
            for (const auto& c : s->cells) worst_parity = std::max(worst_parity, c.parity_residual);
            for (const auto& m : s->measures) worst_martingale = std::max(worst_martingale, m.martingale_residual);
        }
        summary.push_back({{"lambda", lambda},
                           {"zeta_f", spec.zeta_f},
                           {"tangent_alpha", ts[l].point.alpha},
                           {"tangent_weights", to_json_vector(w)},
                           {"tangent_redraws", paths.redraws},
                           {"index_redraws", index_paths.redraws},
                           {"max_parity_residual", worst_parity},
                           {"max_martingale_residual", worst_martingale}});
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    std::printf("wrote option surfaces for %zu lambdas to %s\n", cfg.lambdas.size(), dir.string().c_str());
}

void srr(const RunConfig& cfg) {
    const auto md = load(cfg);
    const auto dir = command_dir(cfg, "srr");
    CsvWriter series(dir / "srr_series.csv"), stats(dir / "ir_stats.csv");
    series << "date" << "lambda" << "srr" << "mu_pi" << "sigma_pi_norm" << "ir" << "residual" << "condition" << "error";
    series.end_row();
    stats << "lambda" << "mu_ir" << "sigma_ir" << "count";
    stats.end_row();
    for (double lambda : cfg.srr_lambda_grid.values()) {
        const auto s = srr_series(md.returns, md.daily_scores, {lambda, cfg.c}, cfg.srr_window, cfg.reduction);
        for (const auto& d : s) {
            series << format_date(d.date) << lambda;
            if (d.solution) {
                const auto& x = *d.solution;
                series << x.srr << x.mu_pi << x.sigma_pi_norm << x.ir << x.residual << x.condition << std::string();
            } else {
                std::string err = d.error;
                std::replace(err.begin(), err.end(), ',', ';');
                series << "nan" << "nan" << "nan" << "nan" << "nan" << "nan" << err;
            }
            series.end_row();
        }
        const auto st = ir_stats(s);
        stats << lambda << st.mu_ir << st.sigma_ir << num(static_cast<double>(st.count));
        stats.end_row();
    }
    std::printf("wrote shadow-rate series to %s\n", dir.string().c_str());
}

void backtest(const RunConfig& cfg) {
    const auto md = load(cfg);
    BacktestSettings s;
    s.lambdas = cfg.lambdas;
    s.alpha = cfg.backtest_alpha;
    s.risk = cfg.risk;
    s.beta = cfg.beta;
    s.window = cfg.window;
    s.scenarios = cfg.scenarios;
    s.gamma = cfg.gamma;
    s.cost_bps = cfg.cost_bps;
    s.seed = cfg.seed;
    s.c = cfg.c;
    if (cfg.start) s.start = parse_date(*cfg.start);
    if (cfg.end) s.end = parse_date(*cfg.end);
    if (!cfg.index_weights.empty())
        s.index_weights = Eigen::Map<const Eigen::VectorXd>(cfg.index_weights.data(),
                                                            static_cast<Eigen::Index>(cfg.index_weights.size()));
    const auto result = run_backtest(md, s);
    const auto dir = command_dir(cfg, "backtest");

    constexpr double kTableBeta = 0.95;
    CsvWriter perf(dir / "performance.csv"), mom(dir / "moments.csv"), rrr(dir / "rrr.csv");
    perf << "strategy" << "lambda" << "space" << "tot_ret" << "ann_ret" << "avg_turnover" << "etl95" << "etr95" << "mdd"
         << "esg_avg" << "esg_std";
    perf.end_row();
    mom << "strategy" << "lambda" << "space" << "mean" << "median" << "std" << "skew" << "excess_kurtosis";
    mom.end_row();
    rrr << "strategy" << "lambda" << "space" << "sharpe" << "sortino" << "star" << "rachev" << "gini" << "star_rf"
        << "star_esg_rf";
    rrr.end_row();

    std::ofstream warn(dir / "warnings.txt");
    for (const auto& st : result.strategies) {
        const std::string name = st.name == "optimized" ? std::string(to_string(cfg.risk)) : st.name;
        write_series(dir / ("series_" + name + "_lambda_" + tag(st.lambda) + ".csv"), st, result.tickers);
        for (const auto& w : st.warnings) warn << name << " lambda=" << tag(st.lambda) << ' ' << w << '\n';

        const double turnover = rebalancing_turnover(st);
        const auto n = static_cast<std::size_t>(st.series.realized_r.size());
        const std::vector<double> zero(n, 0.0);
        std::vector<double> rf(n, 0.0);
        if (md.yields) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto idx = md.returns.calendar.index_of(st.series.dates[k]);
                rf[k] = md.yields->daily_rate(idx);
            }
        }
        for (const char* space : {"R", "Z"}) {
            const bool z = space[0] == 'Z';
            const auto& x = z ? st.series.realized_z : st.series.realized_r;
            perf << name << st.lambda << std::string(space);
            mom << name << st.lambda << std::string(space);
            rrr << name << st.lambda << std::string(space);
            try {
                const auto ps =
                    summarize_performance(span_of(x), span_of(st.series.esg_score), turnover, kTableBeta, cfg.c);
                perf << ps.tot_ret << ps.ann_ret << ps.avg_turnover << ps.etl << ps.etr << ps.mdd << ps.esg_avg
                     << ps.esg_std;
            } catch (const SampleTooSmall&) {
                for (int k = 0; k < 8; ++k) perf << "nan";
            }
            perf.end_row();
            try {
                const auto m = moments(span_of(x));
                mom << m.mean << m.median << m.std << m.skew << m.excess_kurtosis;
            } catch (const SampleTooSmall&) {
                for (int k = 0; k < 5; ++k) mom << "nan";
            }
            mom.end_row();
            try {
                const auto suite = rrr_suite(span_of(x), zero, kTableBeta);
                rrr << opt_num(suite.sharpe) << opt_num(suite.sortino) << opt_num(suite.star) << opt_num(suite.rachev)
                    << opt_num(suite.gini);
                auto star_or_nan = [&](RiskFreeBasis basis) {
                    if (!md.yields) return std::string("nan");
                    try {
                        return num(star_ratio(basis, span_of(x), rf, kTableBeta, {st.lambda, cfg.c}));
                    } catch (const ZeroDenominator&) {
                        return std::string("nan");
                    }
                };
                rrr << star_or_nan(RiskFreeBasis::Fixed) << star_or_nan(RiskFreeBasis::Esg);
            } catch (const SampleTooSmall&) {
                for (int k = 0; k < 7; ++k) rrr << "nan";
            }
            rrr.end_row();
        }
    }
    std::printf("backtested %zu decision dates for %zu lambdas into %s\n", result.decision_dates.size(),
                cfg.lambdas.size(), dir.string().c_str());
}

void report(const RunConfig& cfg) {
    if (cfg.report_series.empty()) throw ConfigError("report needs --series pointing at a backtest series CSV");
    std::ifstream in(cfg.report_series);
    if (!in) throw FileError("cannot open '" + cfg.report_series + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(cfg.report_series, 1, "empty file");
    const auto header = csv::split(line);
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const auto col = column(cfg.report_column);
    if (col < 0) throw ParseError(cfg.report_series, 1, "no column '" + cfg.report_column + "'");
    const auto esg_col = column("esg_score");
    const auto to_col = column("turnover");
    std::vector<double> x, esg, turnover;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != header.size()) throw ParseError(cfg.report_series, n, "field count differs from the header");
        x.push_back(csv::to_double(f[static_cast<std::size_t>(col)], cfg.report_series, n));
        esg.push_back(esg_col >= 0 ? csv::to_double(f[static_cast<std::size_t>(esg_col)], cfg.report_series, n) : 0.0);
        if (to_col >= 0) turnover.push_back(csv::to_double(f[static_cast<std::size_t>(to_col)], cfg.report_series, n));
    }
    double avg_to = 0.0;
    if (turnover.size() > 1) {
        for (std::size_t k = 1; k < turnover.size(); ++k) avg_to += turnover[k];
        avg_to /= static_cast<double>(turnover.size() - 1);
    }
    constexpr double kTableBeta = 0.95;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["series"] = cfg.report_series;
    j["column"] = cfg.report_column;
    j["observations"] = x.size();
    json errors = json::object();
    try {
        const auto ps = summarize_performance(x, esg, avg_to, kTableBeta, cfg.c);
        j["performance"] = {{"tot_ret", ps.tot_ret}, {"ann_ret", ps.ann_ret}, {"avg_turnover", ps.avg_turnover},
                            {"etl95", ps.etl},       {"etr95", ps.etr},      {"mdd", ps.mdd},
                            {"esg_avg", ps.esg_avg}, {"esg_std", ps.esg_std}};
    } catch (const SampleTooSmall& e) {
        j["performance"] = nullptr;
        errors["performance"] = e.what();
    }
    try {
        const auto m = moments(x);
        j["moments"] = {{"mean", m.mean},
                        {"median", m.median},
                        {"std", m.std},
                        {"skew", finite_or_null(m.skew)},
                        {"excess_kurtosis", finite_or_null(m.excess_kurtosis)}};
    } catch (const SampleTooSmall& e) {
        j["moments"] = nullptr;
        errors["moments"] = e.what();
    }
    try {
        const auto suite = rrr_suite(x, std::vector<double>(x.size(), 0.0), kTableBeta);
        j["ratios"] = {{"sharpe", opt(suite.sharpe)}, {"sortino", opt(suite.sortino)}, {"star", opt(suite.star)},
                       {"rachev", opt(suite.rachev)}, {"gini", opt(suite.gini)},       {"errors", suite.errors}};
    } catch (const SampleTooSmall& e) {
        j["ratios"] = nullptr;
        errors["ratios"] = e.what();
    }
    j["errors"] = errors;
    const auto dir = command_dir(cfg, "report");
    write_text(dir / "report.json", j.dump(2) + "\n");
    std::printf("%s\n", j.dump(2).c_str());
}

}  // namespace esgport::commands
