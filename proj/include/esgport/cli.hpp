#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esgport/optimizer.hpp"
#include "esgport/pipeline.hpp"
#include "esgport/shadow_rate.hpp"

namespace esgport {

/// start:step:stop, inclusive of stop up to rounding.
struct GridSpec {
    double start = 0.0;
    double step = 0.01;
    double stop = 0.99;
    std::vector<double> values() const { return make_grid(start, step, stop); }
};

/// Resolved settings of one run. Every command echoes it next to its outputs.
struct RunConfig {
    DataPaths data{"data/synthetic/prices.csv", "data/synthetic/esg.csv", "data/synthetic/yields.csv"};
    int max_gap = 5;
    double midpoint = 50.0;
    double c = 255.0;

    std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75};
    GridSpec alpha_grid;
    RiskMeasure risk = RiskMeasure::MeanCvar;
    double beta = 0.99;
    std::size_t window = 510;
    std::size_t scenarios = 10000;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::optional<std::string> as_of;  // frontier / tangent / options date; default the last date

    double backtest_alpha = 0.7;
    std::optional<double> gamma = 0.004;  // null disables the turnover cap
    double cost_bps = 2.0;
    std::optional<std::string> start;
    std::optional<std::string> end;
    std::vector<double> index_weights;  // empty: equal weights

    std::vector<int> maturities{15, 32, 49, 66, 83, 100, 117, 134, 151, 168, 185, 201, 218, 235, 252};
    GridSpec moneyness{0.5, 0.1, 1.5};
    std::size_t option_scenarios = 20000;

    GridSpec srr_lambda_grid{0.0, 0.01, 0.9};
    std::size_t srr_window = 510;
    ColumnReduction reduction;

    std::string report_series;  // CSV written by backtest
    std::string report_column = "realized_r";

    /// Throws ConfigError on any out-of-range field.
    void validate() const;
};

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);

/// Entry point of the esgport executable. Returns 0 on success, 1 on a
/// computation error and 2 on an input error.
int run_cli(int argc, char** argv);

}  // namespace esgport
