// Writes the bundled synthetic market: five assets on business days from
// 2015-01-02 to 2020-12-31, annual ESG releases on December 31 and a daily
// ten-year yield. Output is a pure function of the seed.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "esgport/dates.hpp"
#include "esgport/random.hpp"

namespace {

struct AssetSpec {
    const char* ticker;
    double price0;
    double drift;    // daily
    double omega;    // GARCH(1,1) variance intercept
    double a1;
    double b1;
    double beta;     // loading on the common factor
    double score0;   // ESG score at the first release
    double score_trend;
};

constexpr std::array<AssetSpec, 5> kAssets{{
    {"AQUA", 48.0, 0.00045, 2.0e-6, 0.06, 0.92, 0.9, 82.0, 1.5},
    {"BOLT", 112.0, 0.00060, 4.0e-6, 0.08, 0.90, 1.2, 38.0, -1.0},
    {"CEDR", 75.0, 0.00030, 1.5e-6, 0.05, 0.93, 0.7, 64.0, 2.0},
    {"DUNE", 23.0, 0.00050, 6.0e-6, 0.10, 0.86, 1.0, 27.0, 3.0},
    {"EMBR", 160.0, 0.00040, 2.5e-6, 0.07, 0.91, 0.8, 91.0, -0.5},
}};

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic five-asset dataset"};
    std::string out_dir = "data/synthetic";
    std::uint64_t seed = 20150102;
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    using namespace esgport;
    std::filesystem::create_directories(out_dir);
    const auto days = business_days(parse_date("2015-01-02"), parse_date("2020-12-31"));
    const std::size_t n = kAssets.size();

    RandomStream rng(seed, 0);
    std::ofstream prices(out_dir + "/prices.csv");
    prices << "date,ticker,close\n";
    Eigen::VectorXd log_price(static_cast<Eigen::Index>(n)), var(static_cast<Eigen::Index>(n)),
        last_e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = kAssets[i];
        log_price(static_cast<Eigen::Index>(i)) = std::log(a.price0);
        var(static_cast<Eigen::Index>(i)) = a.omega / (1.0 - a.a1 - a.b1);
    }
    for (std::size_t t = 0; t < days.size(); ++t) {
        if (t > 0) {
            const double factor = rng.normal();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = kAssets[i];
                const auto k = static_cast<Eigen::Index>(i);
                var(k) = a.omega + a.a1 * last_e(k) * last_e(k) + a.b1 * var(k);
                // Common factor carries a share beta^2 / (1 + beta^2) of the variance.
                const double z = (a.beta * factor + rng.normal()) / std::sqrt(1.0 + a.beta * a.beta);
                last_e(k) = std::sqrt(var(k)) * z;
                log_price(k) += a.drift + last_e(k);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            prices << format_date(days[t]) << ',' << kAssets[i].ticker << ','
                   << fmt(std::exp(log_price(static_cast<Eigen::Index>(i))), 4) << '\n';
    }

    RandomStream esg_rng(seed, 1);
    std::ofstream esg(out_dir + "/esg.csv");
    esg << "release_date,ticker,score\n";
    for (int year = 2014; year <= 2019; ++year) {
        for (const auto& a : kAssets) {
            const double s = a.score0 + a.score_trend * (year - 2014) + 2.0 * esg_rng.normal();
            esg << year << "-12-31," << a.ticker << ',' << fmt(std::clamp(s, 0.0, 100.0), 1) << '\n';
        }
    }

    RandomStream y_rng(seed, 2);
    std::ofstream yields(out_dir + "/yields.csv");
    yields << "date,yield\n";
    double y = 0.0217;
    for (const auto d : days) {
        y = std::clamp(y + 0.0004 * y_rng.normal() + 0.002 * (0.02 - y), 0.004, 0.04);
        yields << format_date(d) << ',' << fmt(y, 5) << '\n';
    }
    std::printf("wrote %zu dates for %zu assets to %s\n", days.size(), n, out_dir.c_str());
    return 0;
}
