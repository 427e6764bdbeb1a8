#include <doctest.h>

#include <cmath>
#include <random>

#include "esgport/error.hpp"
#include "esgport/shadow_rate.hpp"

using namespace esgport;

namespace {

MarketEstimate estimate(const Eigen::VectorXd& mu, const Eigen::MatrixXd& Sigma, std::vector<std::string> tickers) {
    MarketEstimate e;
    e.mu = mu;
    e.Sigma = Sigma;
    e.tickers = std::move(tickers);
    return e;
}

}  // namespace

TEST_CASE("hand-solved two-asset deflator") {
    Eigen::MatrixXd sigma(2, 1);
    sigma << 0.2, 0.1;
    const auto d = solve_deflator(Eigen::Vector2d(0.10, 0.05), sigma);
    CHECK(d.sigma_pi(0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(d.mu_pi) <= 1e-15);
    CHECK(d.srr == -d.mu_pi);
    CHECK(d.residual <= 1e-15);
}

TEST_CASE("a row without diffusion pins the shadow rate") {
    Eigen::MatrixXd sigma(3, 2);
    sigma << 0.3, 0.1, -0.2, 0.4, 0.0, 0.0;
    const auto d = solve_deflator(Eigen::Vector3d(0.02, 0.03, 0.01), sigma);
    CHECK(d.srr == doctest::Approx(0.01).epsilon(1e-13));
}

TEST_CASE("random systems: residual and joint scaling") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int N = 2 + rep % 6;
        Eigen::MatrixXd sigma(N, N - 1);
        Eigen::VectorXd mu(N);
        for (auto& v : sigma.reshaped()) v = n(gen);
        for (auto& v : mu) v = n(gen) * 0.01;
        const auto d = solve_deflator(mu, sigma);
        Eigen::MatrixXd A(N, N);
        A.col(0).setConstant(-1.0);
        A.rightCols(N - 1) = -sigma;
        Eigen::VectorXd x(N);
        x << d.mu_pi, d.sigma_pi;
        if (d.condition < 1e8) CHECK((A * x - mu).cwiseAbs().maxCoeff() <= 1e-10 * mu.cwiseAbs().maxCoeff());
        CHECK(d.sigma_pi_norm == doctest::Approx(d.sigma_pi.norm()));
        CHECK(d.ir == doctest::Approx(d.mu_pi / d.sigma_pi_norm));
        const double k = 3.7;
        const auto s = solve_deflator(mu * k, sigma * k);
        CHECK((s.sigma_pi - d.sigma_pi).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, d.sigma_pi.cwiseAbs().maxCoeff()));
        CHECK(s.mu_pi == doctest::Approx(k * d.mu_pi).epsilon(1e-10));
    }
}

TEST_CASE("singular system") {
    Eigen::MatrixXd sigma(3, 2);
    sigma << 0.1, 0.2, 0.1, 0.2, 0.3, 0.1;
    CHECK_THROWS_AS(solve_deflator(Eigen::Vector3d(0.01, 0.02, 0.03), sigma), SingularSystem);
}

TEST_CASE("two-asset loadings") {
    const double s1 = 0.3, s2 = 0.2, rho = 0.4;
    Eigen::Matrix2d S;
    S << s1 * s1, rho * s1 * s2, rho * s1 * s2, s2 * s2;
    const auto L = build_loadings(estimate(Eigen::Vector2d::Zero(), S, {"A", "B"}));
    CHECK(L.sigma.rows() == 2);
    CHECK(L.sigma.cols() == 1);
    CHECK(L.sigma(0, 0) == doctest::Approx(s1));
    CHECK(L.sigma(1, 0) == doctest::Approx(s2 * (rho + std::sqrt(1 - rho * rho))));
    CHECK(L.order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("diagonal covariance and sort order") {
    const Eigen::Vector3d var(0.01, 0.04, 0.02);
    const auto L = build_loadings(estimate(Eigen::Vector3d::Zero(), var.asDiagonal(), {"A", "B", "C"}));
    CHECK(L.order == std::vector<std::size_t>{1, 2, 0});
    CHECK(L.sigma(0, 0) == doctest::Approx(0.2));
    CHECK(L.sigma(1, 1) == doctest::Approx(std::sqrt(0.02)));
    CHECK(L.sigma(2, 1) == doctest::Approx(0.1));
    CHECK(L.sigma(1, 0) == 0.0);

    const Eigen::Vector3d tie(0.02, 0.02, 0.01);
    const auto T = build_loadings(estimate(Eigen::Vector3d::Zero(), tie.asDiagonal(), {"Z", "M", "A"}));
    CHECK(T.order == std::vector<std::size_t>{1, 0, 2});

    ColumnReduction red{0.5, 2.0};
    const auto W = build_loadings(estimate(Eigen::Vector3d::Zero(), var.asDiagonal(), {"A", "B", "C"}), red);
    CHECK(W.sigma(1, 1) == doctest::Approx(0.5 * std::sqrt(0.02)));
    CHECK(W.sigma(2, 1) == doctest::Approx(0.2));
}

TEST_CASE("factor reconstructs the sorted covariance") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd X(5, 5);
    for (auto& v : X.reshaped()) v = n(gen);
    const Eigen::MatrixXd S = X * X.transpose() * 1e-4 + Eigen::MatrixXd::Identity(5, 5) * 1e-5;
    const auto L = build_loadings(estimate(Eigen::VectorXd::Zero(5), S, {"a", "b", "c", "d", "e"}));
    Eigen::MatrixXd sorted(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) sorted(i, j) = S(static_cast<Eigen::Index>(L.order[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(L.order[static_cast<std::size_t>(j)]));
    CHECK((L.factor * L.factor.transpose() - sorted).cwiseAbs().maxCoeff() <= 1e-10 * sorted.cwiseAbs().maxCoeff());
    for (int i = 1; i < 5; ++i) CHECK(sorted(i, i) <= sorted(i - 1, i - 1));
}

TEST_CASE("market estimate") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> n(0.0, 1.0);
    const int T = 5000, N = 3;
    Eigen::Matrix3d Lt;
    Lt << 0.02, 0, 0, 0.005, 0.01, 0, -0.004, 0.003, 0.015;
    const Eigen::Matrix3d Strue = Lt * Lt.transpose();
    Eigen::MatrixXd R(T, N);
    for (int t = 0; t < T; ++t) {
        Eigen::Vector3d z(n(gen), n(gen), n(gen));
        R.row(t) = (Lt * z).transpose();
    }
    Eigen::MatrixXd scores(T, N);
    for (int t = 0; t < T; ++t) scores.row(t) << 0.2, -0.5, 0.8;
    const auto e0 = estimate_market(R, scores, {0.0, 255.0});
    CHECK((e0.Sigma - Strue).norm() <= 0.1 * Strue.norm());
    const double lambda = 0.3;
    const auto e1 = estimate_market(R, scores, {lambda, 255.0});
    for (int i = 0; i < N; ++i) CHECK(e1.mu(i) == doctest::Approx(lambda * scores(0, i) / 255 + (1 - lambda) * e0.mu(i)).epsilon(1e-12));
    CHECK((e1.Sigma - (1 - lambda) * (1 - lambda) * e0.Sigma).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(estimate_market(R.topRows(4), scores.topRows(4), {0.0, 255.0}), WindowTooShort);
}

TEST_CASE("SRR series and IR statistics") {
    const auto dates = business_days(parse_date("2020-01-01"), parse_date("2020-06-30"));
    ReturnPanel panel;
    panel.tickers = {"A", "B", "C"};
    panel.calendar.dates = dates;
    const auto T = static_cast<Eigen::Index>(dates.size());
    panel.returns.resize(T, 3);
    // Periodic returns repeat every 8 days, so every 40-day window has identical moments.
    const double pattern[8][3] = {{0.01, 0.002, -0.004}, {-0.008, 0.004, 0.006}, {0.003, -0.006, 0.001},
                                  {0.005, 0.001, -0.002}, {-0.002, 0.007, 0.003}, {0.004, -0.003, -0.005},
                                  {-0.006, 0.0, 0.004}, {0.001, -0.002, 0.002}};
    for (Eigen::Index t = 0; t < T; ++t)
        for (int i = 0; i < 3; ++i) panel.returns(t, i) = pattern[t % 8][i];
    panel.filled = BoolMatrix::Constant(T, 3, false);
    EsgPanel scores;
    scores.dates = dates;
    scores.tickers = panel.tickers;
    scores.raw.resize(T, 3);
    for (Eigen::Index t = 0; t < T; ++t) scores.raw.row(t) << 40, 60, 80;
    scores.normalized = normalize_scores(scores.raw);

    const auto s0 = srr_series(panel, scores, {0.0, 255.0}, 40);
    const auto s1 = srr_series(panel, scores, {0.5, 255.0}, 40);
    REQUIRE(s0.size() == dates.size() - 39);
    REQUIRE(s0.front().solution);
    for (const auto& d : s0) {
        REQUIRE(d.solution);
        CHECK(d.solution->srr == doctest::Approx(s0.front().solution->srr).epsilon(1e-9));
    }
    CHECK(std::abs(s1.front().solution->srr - s0.front().solution->srr) > 1e-8);
    const auto st = ir_stats(s0);
    CHECK(st.count == s0.size());
    CHECK(st.sigma_ir <= 1e-8 * std::abs(st.mu_ir));

    std::vector<DatedDeflator> two(2);
    two[0].solution = DeflatorSolution{};
    two[0].solution->ir = 1.0;
    two[1].solution = DeflatorSolution{};
    two[1].solution->ir = 3.0;
    const auto ts = ir_stats(two);
    CHECK(ts.mu_ir == 2.0);
    CHECK(ts.sigma_ir == doctest::Approx(std::sqrt(2.0)));
}
