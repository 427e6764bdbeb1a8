#include <cmath>
#include <set>

#include "esgport/cli.hpp"
#include "esgport/error.hpp"
#include "json.hpp"

namespace esgport {

using nlohmann::json;

namespace {

json grid_json(const GridSpec& g) { return json::array({g.start, g.step, g.stop}); }

GridSpec grid_from(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(key) + " must be [start, step, stop]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

void check_grid(const GridSpec& g, const char* name, double lo, double hi) {
    if (!(g.step > 0.0) || !(g.start <= g.stop) || g.start < lo || g.stop > hi)
        throw ConfigError(std::string(name) + " must satisfy " + std::to_string(lo) + " <= start <= stop <= " +
                          std::to_string(hi) + " with a positive step");
}

}  // namespace

void RunConfig::validate() const {
    if (data.prices.empty() || data.esg.empty()) throw ConfigError("price and ESG paths are required");
    if (max_gap < 0) throw ConfigError("max_gap must be non-negative");
    if (!(midpoint > 0.0 && midpoint < 100.0)) throw ConfigError("midpoint must lie in (0, 100)");
    if (!(c > 0.0)) throw ConfigError("c must be positive");
    if (lambdas.empty()) throw ConfigError("lambda list is empty");
    for (double l : lambdas)
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("lambda outside [0,1]");
    check_grid(alpha_grid, "alpha_grid", 0.0, 1.0);
    if (alpha_grid.stop >= 1.0) throw ConfigError("alpha_grid must stay below 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
    if (window < 100) throw ConfigError("window must be at least 100 returns");
    if (scenarios < 2) throw ConfigError("scenarios must be at least 2");
    if (risk == RiskMeasure::MeanCvar && (1.0 - beta) * static_cast<double>(scenarios) < 1.0)
        throw ConfigError("scenarios * (1 - beta) must be at least 1");
    if (!(backtest_alpha >= 0.0 && backtest_alpha < 1.0)) throw ConfigError("backtest_alpha must lie in [0,1)");
    if (gamma && !(*gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (!(cost_bps >= 0.0 && cost_bps < 1e4)) throw ConfigError("cost_bps must lie in [0, 10000)");
    for (double w : index_weights)
        if (!(w >= 0.0)) throw ConfigError("index weights must be non-negative");
    if (maturities.empty()) throw ConfigError("maturity grid is empty");
    for (int T : maturities)
        if (T < 1) throw ConfigError("maturities must be positive");
    check_grid(moneyness, "moneyness", 1e-9, 1e9);
    if (option_scenarios < 2) throw ConfigError("option_scenarios must be at least 2");
    check_grid(srr_lambda_grid, "srr_lambda_grid", 0.0, 1.0);
    if (srr_window < 4) throw ConfigError("srr_window too short");
    for (const auto* d : {&as_of, &start, &end})
        if (*d) parse_date(**d);
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["prices"] = cfg.data.prices;
    j["esg"] = cfg.data.esg;
    j["yields"] = cfg.data.yields;
    j["max_gap"] = cfg.max_gap;
    j["midpoint"] = cfg.midpoint;
    j["c"] = cfg.c;
    j["lambdas"] = cfg.lambdas;
    j["alpha_grid"] = grid_json(cfg.alpha_grid);
    j["risk"] = to_string(cfg.risk);
    j["beta"] = cfg.beta;
    j["window"] = cfg.window;
    j["scenarios"] = cfg.scenarios;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["as_of"] = optional_json(cfg.as_of);
    j["backtest_alpha"] = cfg.backtest_alpha;
    j["gamma"] = optional_json(cfg.gamma);
    j["cost_bps"] = cfg.cost_bps;
    j["start"] = optional_json(cfg.start);
    j["end"] = optional_json(cfg.end);
    j["index_weights"] = cfg.index_weights;
    j["maturities"] = cfg.maturities;
    j["moneyness"] = grid_json(cfg.moneyness);
    j["option_scenarios"] = cfg.option_scenarios;
    j["srr_lambda_grid"] = grid_json(cfg.srr_lambda_grid);
    j["srr_window"] = cfg.srr_window;
    j["reduction"] = json::array({cfg.reduction.w_last_but_one, cfg.reduction.w_last});
    j["report_series"] = cfg.report_series;
    j["report_column"] = cfg.report_column;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{
        "prices",     "esg",         "yields",        "max_gap",       "midpoint",         "c",
        "lambdas",    "alpha_grid",  "risk",          "beta",          "window",           "scenarios",
        "seed",       "out_dir",     "as_of",         "backtest_alpha", "gamma",           "cost_bps",
        "start",      "end",         "index_weights", "maturities",    "moneyness",        "option_scenarios",
        "srr_lambda_grid", "srr_window", "reduction", "report_series", "report_column"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    RunConfig cfg;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
        };
        auto get_opt = [&](const char* key, auto& field) {
            if (!j.contains(key)) return;
            if (j[key].is_null())
                field.reset();
            else
                field = j[key].get<typename std::decay_t<decltype(field)>::value_type>();
        };
        get("prices", cfg.data.prices);
        get("esg", cfg.data.esg);
        get("yields", cfg.data.yields);
        get("max_gap", cfg.max_gap);
        get("midpoint", cfg.midpoint);
        get("c", cfg.c);
        get("lambdas", cfg.lambdas);
        if (j.contains("alpha_grid")) cfg.alpha_grid = grid_from(j["alpha_grid"], "alpha_grid");
        if (j.contains("risk")) cfg.risk = parse_risk_measure(j["risk"].get<std::string>());
        get("beta", cfg.beta);
        get("window", cfg.window);
        get("scenarios", cfg.scenarios);
        get("seed", cfg.seed);
        get("out_dir", cfg.out_dir);
        get_opt("as_of", cfg.as_of);
        get("backtest_alpha", cfg.backtest_alpha);
        get_opt("gamma", cfg.gamma);
        get("cost_bps", cfg.cost_bps);
        get_opt("start", cfg.start);
        get_opt("end", cfg.end);
        get("index_weights", cfg.index_weights);
        get("maturities", cfg.maturities);
        if (j.contains("moneyness")) cfg.moneyness = grid_from(j["moneyness"], "moneyness");
        get("option_scenarios", cfg.option_scenarios);
        if (j.contains("srr_lambda_grid")) cfg.srr_lambda_grid = grid_from(j["srr_lambda_grid"], "srr_lambda_grid");
        get("srr_window", cfg.srr_window);
        if (j.contains("reduction")) {
            const auto& r = j["reduction"];
            if (!r.is_array() || r.size() != 2) throw ConfigError("reduction must be [w_last_but_one, w_last]");
            cfg.reduction = {r[0].get<double>(), r[1].get<double>()};
        }
        get("report_series", cfg.report_series);
        get("report_column", cfg.report_column);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return cfg;
}

}  // namespace esgport
