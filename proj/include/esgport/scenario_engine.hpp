#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "esgport/esg_transform.hpp"
#include "esgport/nig.hpp"

namespace esgport {

/// ARMA order search bounds, inclusive.
struct OrderGrid {
    int max_p = 2;
    int max_q = 2;
};

struct FitOptions {
    std::size_t min_window = 100;
    /// Random restarts of the GARCH likelihood maximization (in addition to
    /// the default starting point).
    int restarts = 5;
    double ll_tol = 1e-8;
    std::uint64_t seed = 20240101;
    int ljung_box_lag = 10;
    double ljung_box_level = 0.05;
};

struct CandidateDiagnostic {
    int p = 0;
    int q = 0;
    double loglik = 0.0;
    double bic = 0.0;
    bool converged = false;
    std::string message;
};

/// ARMA(p,q) mean with an optional GARCH(1,1) conditional variance:
///
///     r_t = mu + sum phi_k (r_{t-k} - mu) + sum theta_k e_{t-k} + e_t
///     e_t = sigma_t z_t,  sigma_t^2 = omega + a1 e_{t-1}^2 + b1 sigma_{t-1}^2
///
/// When `garch_active` is false the variance is the constant
/// `residual_variance`.
struct ArmaGarchFit {
    int p = 0;
    int q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    double mu = 0.0;
    double omega = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
    bool garch_active = false;
    double residual_variance = 0.0;
    double bic = 0.0;
    double loglik = 0.0;

    bool garch_converged = false;
    double ljung_box_stat = 0.0;
    double ljung_box_pvalue = 1.0;

    /// Lagged state at the end of the window, most recent first.
    std::vector<double> recent_returns;    // size p
    std::vector<double> recent_residuals;  // size max(q, 1)
    double last_variance = 0.0;            // sigma_t^2 of the final observation

    std::vector<CandidateDiagnostic> diagnostics;
    /// e_t / sigma_t over the window (not serialized).
    std::vector<double> standardized_residuals;

    double next_mean() const;
    double next_variance() const;
    /// Throws FitError unless the fitted coefficients satisfy the model's
    /// stationarity and invertibility conditions.
    void check_invariants() const;
};

/// BIC-selected ARMA order over `grid`, then a Gaussian quasi-likelihood
/// GARCH(1,1) on the ARMA residuals. Throws WindowTooShort or FitError.
ArmaGarchFit fit_arma_garch(std::span<const double> series, const OrderGrid& grid = {},
                            const FitOptions& opts = {});

/// Ljung-Box statistic of `x` up to `lag`, with its chi-square p-value.
std::pair<double, double> ljung_box(std::span<const double> x, int lag);

/// Simulated one-period-ahead returns, one row per scenario.
struct ScenarioMatrix {
    Eigen::MatrixXd values;
    std::uint64_t seed = 0;
};

/// Draws S joint NIG innovation vectors and pushes each through every asset's
/// one-step recursion. Scenario s uses its own Philox substream, so the
/// result depends only on (fits, joint, S, seed).
ScenarioMatrix simulate_one_step(std::span<const ArmaGarchFit> fits, const NigParams& joint, std::size_t S,
                                 std::uint64_t seed);

using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// How simulated returns are turned into ESG-valued prices.
struct TrajectoryBlend {
    double score = 0.0;  // normalized score of the underlying, fixed over the horizon
    EsgBlendParams params;
    double spot = 1.0;   // ESG-valued price at the valuation date
};

/// Column k holds horizon k+1 (days).
struct TrajectoryEnsemble {
    PathMatrix returns;
    PathMatrix esg_prices;
    std::size_t redraws = 0;
    std::uint64_t seed = 0;
};

/// Multi-step ARMA-GARCH paths driven by one-dimensional NIG innovations.
/// Paths whose cumulative return exceeds 50 in magnitude are redrawn and
/// counted. ESG-valued prices blend each step's return before cumulating.
TrajectoryEnsemble simulate_trajectories(const ArmaGarchFit& fit, const NigParams& nig, int horizon, std::size_t S,
                                         std::uint64_t seed, const TrajectoryBlend& blend = {});

/// spot * exp(cumulative sum of blended per-step returns), row by row.
PathMatrix esg_price_paths(const PathMatrix& returns, const TrajectoryBlend& blend);

}  // namespace esgport
