#include <doctest.h>

#include <cmath>

#include "esgport/error.hpp"
#include "esgport/scenario_engine.hpp"

using namespace esgport;

namespace {

std::vector<double> simulate_garch(std::uint64_t seed, std::size_t n, double omega, double a1, double b1) {
    RandomStream rng(seed, 1);
    std::vector<double> r(n);
    double s2 = omega / (1.0 - a1 - b1);
    double e = 0.0;
    for (std::size_t t = 0; t < n + 500; ++t) {
        s2 = omega + a1 * e * e + b1 * s2;
        e = std::sqrt(s2) * rng.normal();
        if (t >= 500) r[t - 500] = e;
    }
    return r;
}

NigParams gaussian_limit(Eigen::Index d) {
    NigParams p;
    p.alpha_bar = 1e6;
    p.location = Eigen::VectorXd::Zero(d);
    p.skewness = Eigen::VectorXd::Zero(d);
    p.scale = Eigen::MatrixXd::Identity(d, d);
    return p;
}

}  // namespace

TEST_CASE("i.i.d. Gaussian data selects ARMA(0,0) without GARCH") {
    int hits = 0;
    const int trials = 50;
    for (int seed = 0; seed < trials; ++seed) {
        RandomStream rng(1000 + seed, 0);
        std::vector<double> r(1000);
        for (auto& v : r) v = 0.0005 + 0.01 * rng.normal();
        const auto fit = fit_arma_garch(r);
        if (fit.p == 0 && fit.q == 0 && !fit.garch_active) ++hits;
        CHECK(fit.diagnostics.size() == 9);
    }
    CHECK(hits >= 45);
}

TEST_CASE("GARCH(1,1) persistence is recovered") {
    const auto r = simulate_garch(77, 4000, 1e-6, 0.08, 0.9);
    const auto fit = fit_arma_garch(r);
    REQUIRE(fit.garch_active);
    CHECK(std::abs(fit.a1 + fit.b1 - 0.98) <= 0.05);
    CHECK(fit.a1 + fit.b1 < 1.0);
    CHECK(fit.standardized_residuals.size() == r.size() - 2);
}

TEST_CASE("AR(1) coefficient is recovered") {
    RandomStream rng(5, 0);
    std::vector<double> r(3000);
    double prev = 0.0;
    for (auto& v : r) {
        v = 0.6 * prev + rng.normal();
        prev = v;
    }
    const auto fit = fit_arma_garch(r);
    CHECK(fit.p >= 1);
    CHECK(fit.phi[0] == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("degenerate windows are rejected") {
    std::vector<double> flat(500, 0.001);
    CHECK_THROWS_AS(fit_arma_garch(flat), FitError);
    std::vector<double> tiny(50, 0.0);
    CHECK_THROWS_AS(fit_arma_garch(tiny), WindowTooShort);
}

TEST_CASE("Ljung-Box on white noise and on a persistent series") {
    RandomStream rng(8, 0);
    std::vector<double> w(2000), ar(2000);
    double prev = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        w[t] = rng.normal();
        prev = 0.5 * prev + w[t];
        ar[t] = prev;
    }
    CHECK(ljung_box(w, 10).second > 0.01);
    CHECK(ljung_box(ar, 10).second < 1e-6);
}

TEST_CASE("one-step scenarios: determinism, mean and variance") {
    RandomStream rng(12, 0);
    std::vector<double> a(600), b(600);
    for (std::size_t t = 0; t < a.size(); ++t) {
        a[t] = 0.001 + 0.02 * rng.normal();
        b[t] = -0.0005 + 0.01 * rng.normal();
    }
    std::vector<ArmaGarchFit> fits{fit_arma_garch(a), fit_arma_garch(b)};
    const auto joint = gaussian_limit(2);
    const std::size_t S = 10000;
    const auto s1 = simulate_one_step(fits, joint, S, 42);
    const auto s2 = simulate_one_step(fits, joint, S, 42);
    CHECK((s1.values.array() == s2.values.array()).all());
    CHECK(s1.values.allFinite());
    for (Eigen::Index i = 0; i < 2; ++i) {
        const auto& f = fits[static_cast<std::size_t>(i)];
        const double sd = std::sqrt(f.next_variance());
        const double m = s1.values.col(i).mean();
        CHECK(std::abs(m - f.next_mean()) <= 3.0 * sd / std::sqrt(double(S)));
        if (!f.garch_active) {
            const double var = (s1.values.col(i).array() - m).square().sum() / (S - 1.0);
            CHECK(std::abs(var / f.residual_variance - 1.0) <= 0.05);
        }
    }
    CHECK_THROWS_AS(simulate_one_step(fits, gaussian_limit(3), S, 1), ShapeError);
}

TEST_CASE("trajectories: degenerate volatility, lambda 0 and long horizons") {
    ArmaGarchFit fit;
    fit.mu = 0.001;
    fit.residual_variance = 0.0;
    fit.recent_residuals = {0.0};
    const auto joint = gaussian_limit(1);
    const auto ens = simulate_trajectories(fit, joint, 20, 5, 3);
    for (Eigen::Index s = 0; s < 5; ++s)
        for (Eigen::Index k = 0; k < 20; ++k) CHECK(ens.returns(s, k) == 0.001);

    fit.residual_variance = 1e-4;
    TrajectoryBlend blend;
    blend.spot = 2.0;
    const auto e0 = simulate_trajectories(fit, joint, 30, 100, 4, blend);
    for (Eigen::Index s = 0; s < 100; ++s) {
        double cum = 0.0;
        for (Eigen::Index k = 0; k < 30; ++k) {
            cum += e0.returns(s, k);
            CHECK(e0.esg_prices(s, k) == 2.0 * std::exp(cum));
        }
    }

    blend.params.lambda = 0.4;
    blend.score = 0.6;
    const auto e1 = simulate_trajectories(fit, joint, 30, 100, 4, blend);
    CHECK((e1.returns.array() == e0.returns.array()).all());
    double cum = 0.0;
    for (Eigen::Index k = 0; k < 30; ++k) {
        cum += 0.4 * 0.6 / 255.0 + 0.6 * e1.returns(7, k);
        CHECK(e1.esg_prices(7, k) == doctest::Approx(2.0 * std::exp(cum)).epsilon(1e-13));
    }

    const auto big = simulate_trajectories(fit, joint, 252, 20000, 5, blend);
    CHECK((big.esg_prices.array() > 0.0).all());
    CHECK(big.esg_prices.allFinite());
}

TEST_CASE("fit invariants flag non-stationary coefficients") {
    ArmaGarchFit f;
    f.p = 1;
    f.phi = {1.2};
    CHECK_THROWS_AS(f.check_invariants(), FitError);
    f.phi = {0.5};
    f.garch_active = true;
    f.omega = 1e-6;
    f.a1 = 0.3;
    f.b1 = 0.75;
    CHECK_THROWS_AS(f.check_invariants(), FitError);
}
