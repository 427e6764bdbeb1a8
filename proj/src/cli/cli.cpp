#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "esgport/cli.hpp"
#include "esgport/error.hpp"
#include "json.hpp"

namespace esgport {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_number(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(flag + ": '" + s + "' is not a number");
    }
}

/// start:step:stop
GridSpec parse_grid(const std::string& s, const std::string& flag) {
    const auto parts = split_list(s, ':');
    if (parts.size() != 3) throw ConfigError(flag + " expects start:step:stop");
    return {to_number(parts[0], flag), to_number(parts[1], flag), to_number(parts[2], flag)};
}

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
    if (s.find(':') != std::string::npos) return parse_grid(s, flag).values();
    std::vector<double> out;
    for (const auto& p : split_list(s, ',')) out.push_back(to_number(p, flag));
    return out;
}

/// "a:b" (unit step), "a:step:b" or a comma list of days.
std::vector<int> parse_days(const std::string& s, const std::string& flag) {
    const auto parts = split_list(s, ':');
    std::vector<double> v;
    if (parts.size() == 2)
        v = make_grid(to_number(parts[0], flag), 1.0, to_number(parts[1], flag));
    else
        v = parse_list(s, flag);
    std::vector<int> out;
    for (double d : v) {
        if (d != std::round(d)) throw ConfigError(flag + " expects whole days");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Flags {
    std::string config, prices, esg, yields, lambda, alpha_grid, risk, lambda_grid, t_grid, m_grid, as_of, start, end,
        gamma, series, column;
    int max_gap = 0;
    double scale_c = 0, beta = 0, alpha = 0, cost_bps = 0;
    std::size_t window = 0, scenarios = 0, option_scenarios = 0, srr_window = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void report_error(const std::string& out_dir, const std::string& kind, const std::string& message, bool input) {
    nlohmann::json j{{"error", kind}, {"message", message}, {"input_error", input}};
    const auto text = j.dump();
    std::fprintf(stderr, "%s\n", text.c_str());
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) std::ofstream(std::filesystem::path(out_dir) / "error.json") << text << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"ESG-valued portfolio optimization, option valuation and shadow riskless rates"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "JSON run configuration");
    app.add_option("--prices", f.prices, "Price CSV (date,ticker,close)");
    app.add_option("--esg", f.esg, "ESG release CSV (release_date,ticker,score)");
    app.add_option("--yields", f.yields, "Yield CSV (date,annual_yield)");
    app.add_option("--max-gap", f.max_gap, "Longest forward-filled price gap");
    app.add_option("--scale-c", f.scale_c, "Return periods per year");
    app.add_option("--lambda", f.lambda, "ESG affinities, e.g. 0,0.25,0.5,0.75");
    app.add_option("--alpha-grid", f.alpha_grid, "Frontier grid start:step:stop");
    app.add_option("--alpha", f.alpha, "Backtest reward weight");
    app.add_option("--risk", f.risk, "mv or mcvar");
    app.add_option("--beta", f.beta, "CVaR level");
    app.add_option("--window", f.window, "Estimation window in returns");
    app.add_option("--scenarios", f.scenarios, "One-step scenarios per date");
    app.add_option("--gamma", f.gamma, "Daily turnover cap, or 'none'");
    app.add_option("--cost-bps", f.cost_bps, "Transaction cost per side in basis points");
    app.add_option("--start", f.start, "First backtest decision date");
    app.add_option("--end", f.end, "Last backtest decision date");
    app.add_option("--as-of", f.as_of, "Valuation date for frontier, tangent and price-options");
    app.add_option("--t-grid", f.t_grid, "Option maturities in days, a:b or a:step:b or a list");
    app.add_option("--m-grid", f.m_grid, "Moneyness grid start:step:stop");
    app.add_option("--option-scenarios", f.option_scenarios, "Paths per option surface");
    app.add_option("--lambda-grid", f.lambda_grid, "Shadow-rate lambda grid start:step:stop");
    app.add_option("--srr-window", f.srr_window, "Shadow-rate estimation window");
    app.add_option("--series", f.series, "Series CSV for report");
    app.add_option("--column", f.column, "Return column for report");
    app.add_option("--seed", f.seed, "Master seed");
    app.add_option("--out-dir", f.out_dir, "Output directory");

    const std::vector<std::pair<std::string, std::string>> subs{
        {"ingest", "Validate and align the input files"},
        {"frontier", "Efficient frontiers per lambda on one date"},
        {"backtest", "Rolling daily re-optimization with costs and benchmarks"},
        {"tangent", "Tangent portfolios against the ESG-valued riskless rate"},
        {"price-options", "Call and put surfaces on tangent and index portfolios"},
        {"srr", "Shadow riskless rate series over a lambda grid"},
        {"report", "Performance, moment and ratio tables for one series"}};
    for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string out_dir = f.out_dir.empty() ? std::string("out") : f.out_dir;
    try {
        RunConfig cfg = f.config.empty() ? RunConfig{} : config_from_json(read_file(f.config));
        auto given = [&](const char* flag) { return app.count(flag) > 0; };
        if (given("--prices")) cfg.data.prices = f.prices;
        if (given("--esg")) cfg.data.esg = f.esg;
        if (given("--yields")) cfg.data.yields = f.yields;
        if (given("--max-gap")) cfg.max_gap = f.max_gap;
        if (given("--scale-c")) cfg.c = f.scale_c;
        if (given("--lambda")) cfg.lambdas = parse_list(f.lambda, "--lambda");
        if (given("--alpha-grid")) cfg.alpha_grid = parse_grid(f.alpha_grid, "--alpha-grid");
        if (given("--alpha")) cfg.backtest_alpha = f.alpha;
        if (given("--risk")) cfg.risk = parse_risk_measure(f.risk);
        if (given("--beta")) cfg.beta = f.beta;
        if (given("--window")) cfg.window = f.window;
        if (given("--scenarios")) cfg.scenarios = f.scenarios;
        if (given("--gamma")) {
            if (f.gamma == "none" || f.gamma == "inf")
                cfg.gamma.reset();
            else
                cfg.gamma = to_number(f.gamma, "--gamma");
        }
        if (given("--cost-bps")) cfg.cost_bps = f.cost_bps;
        if (given("--start")) cfg.start = f.start;
        if (given("--end")) cfg.end = f.end;
        if (given("--as-of")) cfg.as_of = f.as_of;
        if (given("--t-grid")) cfg.maturities = parse_days(f.t_grid, "--t-grid");
        if (given("--m-grid")) cfg.moneyness = parse_grid(f.m_grid, "--m-grid");
        if (given("--option-scenarios")) cfg.option_scenarios = f.option_scenarios;
        if (given("--lambda-grid")) cfg.srr_lambda_grid = parse_grid(f.lambda_grid, "--lambda-grid");
        if (given("--srr-window")) cfg.srr_window = f.srr_window;
        if (given("--series")) cfg.report_series = f.series;
        if (given("--column")) cfg.report_column = f.column;
        if (given("--seed")) cfg.seed = f.seed;
        if (given("--out-dir")) cfg.out_dir = f.out_dir;
        out_dir = cfg.out_dir;
        cfg.validate();

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "ingest") commands::ingest(cfg);
        else if (cmd == "frontier") commands::frontier(cfg);
        else if (cmd == "backtest") commands::backtest(cfg);
        else if (cmd == "tangent") commands::tangent(cfg);
        else if (cmd == "price-options") commands::price_options(cfg);
        else if (cmd == "srr") commands::srr(cfg);
        else commands::report(cfg);
        return 0;
    } catch (const Error& e) {
        report_error(out_dir, e.kind(), e.what(), e.is_input_error());
        return e.is_input_error() ? 2 : 1;
    } catch (const std::exception& e) {
        report_error(out_dir, "InternalError", e.what(), false);
        return 1;
    }
}

}  // namespace esgport
