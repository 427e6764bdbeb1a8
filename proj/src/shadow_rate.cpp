#include "esgport/shadow_rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "esgport/error.hpp"

namespace esgport {

MarketEstimate estimate_market(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& scores,
                               const EsgBlendParams& p, std::vector<std::string> tickers) {
    const auto T = returns.rows();
    const auto N = returns.cols();
    if (scores.rows() != T || scores.cols() != N) throw ShapeError("score window does not match the return window");
    if (!tickers.empty() && static_cast<Eigen::Index>(tickers.size()) != N)
        throw ShapeError("ticker count does not match the return window");
    if (T < N + 2)
        throw WindowTooShort("market estimate needs at least N+2 = " + std::to_string(N + 2) + " rows, got " +
                             std::to_string(T));
    p.validate();
    const Eigen::MatrixXd z = (p.lambda / p.c) * scores + (1.0 - p.lambda) * returns;
    MarketEstimate est;
    est.tickers = std::move(tickers);
    est.window = static_cast<std::size_t>(T);
    est.mu = z.colwise().mean().transpose();
    const Eigen::MatrixXd c = z.rowwise() - est.mu.transpose();
    est.Sigma = c.transpose() * c / static_cast<double>(T - 1);
    est.Sigma = 0.5 * (est.Sigma + est.Sigma.transpose());
    const double floor = 1e-12 * est.Sigma.trace() / static_cast<double>(N);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.Sigma);
    if (es.eigenvalues().minCoeff() < floor) {
        est.Sigma = es.eigenvectors() * es.eigenvalues().cwiseMax(floor).asDiagonal() * es.eigenvectors().transpose();
        est.Sigma = 0.5 * (est.Sigma + est.Sigma.transpose());
        est.psd_repaired = true;
    }
    return est;
}

LoadingMatrix build_loadings(const MarketEstimate& est, const ColumnReduction& reduction) {
    const auto N = est.Sigma.rows();
    if (N < 2) throw ShapeError("loadings need at least two assets");
    LoadingMatrix out;
    out.order.resize(static_cast<std::size_t>(N));
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
        const double va = est.Sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
        const double vb = est.Sigma(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
        if (va != vb) return va > vb;
        if (!est.tickers.empty()) return est.tickers[a] < est.tickers[b];
        return a < b;
    });
    Eigen::MatrixXd sorted(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            sorted(i, j) = est.Sigma(static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(i)]),
                                     static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(j)]));
    const Eigen::LLT<Eigen::MatrixXd> llt(sorted);
    if (llt.info() != Eigen::Success) throw CholeskyError("sorted covariance is not positive definite");
    out.factor = llt.matrixL();
    out.sigma = out.factor.leftCols(N - 1);
    out.sigma.col(N - 2) = reduction.w_last_but_one * out.factor.col(N - 2) + reduction.w_last * out.factor.col(N - 1);
    return out;
}

DeflatorSolution solve_deflator(const Eigen::VectorXd& mu, const Eigen::MatrixXd& loadings) {
    const auto N = mu.size();
    if (loadings.rows() != N || loadings.cols() != N - 1)
        throw ShapeError("loadings must be N x (N-1) for N = " + std::to_string(N));
    Eigen::MatrixXd A(N, N);
    A.col(0).setConstant(-1.0);
    A.rightCols(N - 1) = -loadings;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double cond = sv(N - 1) > 0.0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= 1e12)) throw SingularSystem("deflator system condition number " + std::to_string(cond));
    const Eigen::VectorXd x = A.fullPivLu().solve(mu);
    DeflatorSolution s;
    s.mu_pi = x(0);
    s.sigma_pi = x.tail(N - 1);
    s.srr = -s.mu_pi;
    s.sigma_pi_norm = s.sigma_pi.norm();
    s.ir = s.mu_pi / s.sigma_pi_norm;
    s.residual = (A * x - mu).lpNorm<Eigen::Infinity>();
    s.condition = cond;
    return s;
}

DeflatorSolution solve_deflator(const MarketEstimate& est, const LoadingMatrix& loadings) {
    Eigen::VectorXd mu(est.mu.size());
    for (std::size_t k = 0; k < loadings.order.size(); ++k)
        mu(static_cast<Eigen::Index>(k)) = est.mu(static_cast<Eigen::Index>(loadings.order[k]));
    return solve_deflator(mu, loadings.sigma);
}

std::vector<DatedDeflator> srr_series(const ReturnPanel& panel, const EsgPanel& daily_scores,
                                      const EsgBlendParams& p, std::size_t window,
                                      const ColumnReduction& reduction) {
    if (daily_scores.tickers != panel.tickers) throw AlignmentError("score and return tickers differ");
    if (daily_scores.dates != panel.calendar.dates) throw AlignmentError("score dates differ from the return calendar");
    const std::size_t T = panel.periods();
    if (window < panel.assets() + 2 || window > T)
        throw WindowTooShort("SRR window " + std::to_string(window) + " does not fit " + std::to_string(T) +
                             " return dates");
    const auto N = static_cast<Eigen::Index>(panel.assets());
    std::vector<DatedDeflator> out;
    out.reserve(T - window + 1);
    for (std::size_t end = window - 1; end < T; ++end) {
        DatedDeflator d;
        d.date = panel.calendar.dates[end];
        d.lambda = p.lambda;
        const auto start = static_cast<Eigen::Index>(end + 1 - window);
        const auto rows = static_cast<Eigen::Index>(window);
        try {
            const auto est = estimate_market(panel.returns.block(start, 0, rows, N),
                                             daily_scores.normalized.block(start, 0, rows, N), p, panel.tickers);
            d.solution = solve_deflator(est, build_loadings(est, reduction));
        } catch (const Error& e) {
            d.error = e.kind() + ": " + e.what();
        }
        out.push_back(std::move(d));
    }
    return out;
}

IrStats ir_stats(std::span<const DatedDeflator> series) {
    IrStats s;
    std::vector<double> ir;
    for (const auto& d : series) {
        s.lambda = d.lambda;
        if (d.solution && std::isfinite(d.solution->ir)) ir.push_back(d.solution->ir);
    }
    s.count = ir.size();
    if (ir.empty()) {
        s.mu_ir = s.sigma_ir = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    s.mu_ir = std::accumulate(ir.begin(), ir.end(), 0.0) / static_cast<double>(ir.size());
    double ss = 0.0;
    for (double v : ir) ss += (v - s.mu_ir) * (v - s.mu_ir);
    s.sigma_ir = ir.size() > 1 ? std::sqrt(ss / static_cast<double>(ir.size() - 1)) : 0.0;
    return s;
}

}  // namespace esgport
