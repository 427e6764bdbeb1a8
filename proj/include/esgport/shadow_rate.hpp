#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esgport/dates.hpp"
#include "esgport/esg_transform.hpp"
#include "esgport/market_data.hpp"

namespace esgport {

/// Drift and covariance of ESG-valued daily returns over a window.
struct MarketEstimate {
    Eigen::VectorXd mu;
    Eigen::MatrixXd Sigma;
    std::vector<std::string> tickers;
    std::size_t window = 0;
    bool psd_repaired = false;
};

/// Sample mean and covariance of lambda-blended returns. `returns` and
/// `scores` (normalized) are T x N with matching rows. Eigenvalues below
/// 1e-12 trace/N are lifted to that floor. Throws WindowTooShort when
/// T < N + 2.
MarketEstimate estimate_market(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& scores,
                               const EsgBlendParams& p, std::vector<std::string> tickers = {});

/// Diffusion loadings of N assets on N-1 Brownian motions.
struct LoadingMatrix {
    /// N x (N-1); row k belongs to asset order[k].
    Eigen::MatrixXd sigma;
    /// Full lower Cholesky factor of the sorted covariance, before reduction.
    Eigen::MatrixXd factor;
    /// Original asset index of each row, by decreasing variance (ties by ticker).
    std::vector<std::size_t> order;
};

/// Weights of the last two Brownian columns in the reduced column.
struct ColumnReduction {
    double w_last_but_one = 1.0;
    double w_last = 1.0;
};

/// Sorts assets by decreasing variance, factors Sigma = L L' and merges the
/// last two columns of L into w1 col_{N-1} + w2 col_N. Throws CholeskyError
/// if the sorted covariance is not positive definite and ShapeError for N < 2.
LoadingMatrix build_loadings(const MarketEstimate& est, const ColumnReduction& reduction = {});

struct DeflatorSolution {
    double mu_pi = 0.0;
    Eigen::VectorXd sigma_pi;
    double srr = 0.0;  // -mu_pi
    double sigma_pi_norm = 0.0;
    double ir = 0.0;   // mu_pi / sigma_pi_norm
    double residual = 0.0;
    double condition = 0.0;
};

/// Solves [-1 | -sigma] (mu_pi, sigma_pi) = mu. Throws SingularSystem when the
/// condition number exceeds 1e12.
DeflatorSolution solve_deflator(const Eigen::VectorXd& mu, const Eigen::MatrixXd& loadings);

/// solve_deflator with mu permuted into the loading row order.
DeflatorSolution solve_deflator(const MarketEstimate& est, const LoadingMatrix& loadings);

struct DatedDeflator {
    Date date;
    double lambda = 0.0;
    std::optional<DeflatorSolution> solution;
    std::string error;
};

/// One solve per date, each over the `window` returns ending on that date.
/// `daily_scores` is a filled panel on the return calendar with the same
/// tickers. Per-date failures are recorded and the series continues.
std::vector<DatedDeflator> srr_series(const ReturnPanel& panel, const EsgPanel& daily_scores,
                                      const EsgBlendParams& p, std::size_t window,
                                      const ColumnReduction& reduction = {});

struct IrStats {
    double lambda = 0.0;
    double mu_ir = 0.0;
    double sigma_ir = 0.0;
    std::size_t count = 0;
};

/// Time mean and sample standard deviation of the information ratio over the
/// successful solves of one series.
IrStats ir_stats(std::span<const DatedDeflator> series);

}  // namespace esgport
