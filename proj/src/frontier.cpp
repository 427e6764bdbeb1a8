#include "esgport/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esgport/error.hpp"

namespace esgport {

namespace {

double sample_std(const Eigen::VectorXd& x) {
    if (x.size() < 2) return 0.0;
    const double m = x.mean();
    return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

double cvar_or_nan(const Eigen::VectorXd& x, double beta) {
    if ((1.0 - beta) * static_cast<double>(x.size()) < 1.0 - 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return sample_cvar(x, beta);
}

}  // namespace

AssetScores AssetScores::from_raw(const Eigen::VectorXd& raw, const NormalizationMap& map) {
    AssetScores s;
    s.raw = raw;
    s.normalized = normalize_scores(raw, map);
    return s;
}

FrontierPoint evaluate_point(const Eigen::MatrixXd& raw_scenarios, const Eigen::MatrixXd& blended,
                             const AssetScores& scores, const Eigen::VectorXd& weights, const EsgBlendParams& p,
                             const OptimizationSpec& spec) {
    FrontierPoint fp;
    fp.lambda = p.lambda;
    fp.alpha = spec.alpha;
    fp.weights = weights;
    const Eigen::VectorXd xr = raw_scenarios * weights;
    const Eigen::VectorXd xz = blended * weights;
    fp.mean_r = xr.mean();
    fp.mean_z = xz.mean();
    fp.std_r = sample_std(xr);
    fp.std_z = sample_std(xz);
    fp.cvar_r = cvar_or_nan(xr, spec.beta);
    fp.cvar_z = cvar_or_nan(xz, spec.beta);
    const bool mv = spec.risk == RiskMeasure::MeanVariance;
    fp.risk_r = mv ? fp.std_r : fp.cvar_r;
    fp.risk_z = mv ? fp.std_z : fp.cvar_z;
    fp.esg_star = weights.dot(scores.raw);
    fp.sigma_star = weights.dot(scores.normalized);
    return fp;
}

std::vector<FrontierPoint> build_frontier(const Eigen::MatrixXd& raw_scenarios, const AssetScores& scores,
                                          const EsgBlendParams& p, std::span<const double> alpha_grid,
                                          const OptimizationSpec& spec) {
    if (scores.raw.size() != raw_scenarios.cols() || scores.normalized.size() != raw_scenarios.cols())
        throw ShapeError("score vector length does not match scenario columns");
    const Eigen::MatrixXd blended = blend_scenarios(raw_scenarios, scores.normalized, p);
    const auto reports = sweep_alpha(blended, alpha_grid, spec);
    std::vector<FrontierPoint> out;
    out.reserve(reports.size());
    for (std::size_t k = 0; k < reports.size(); ++k) {
        OptimizationSpec at = spec;
        at.alpha = alpha_grid[k];
        const auto& r = reports[k];
        FrontierPoint fp;
        if (r.weights.allFinite()) {
            fp = evaluate_point(raw_scenarios, blended, scores, r.weights, p, at);
        } else {
            fp.lambda = p.lambda;
            fp.alpha = at.alpha;
            fp.weights = r.weights;
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            fp.mean_z = fp.risk_z = fp.std_z = fp.cvar_z = nan;
            fp.mean_r = fp.risk_r = fp.std_r = fp.cvar_r = nan;
            fp.esg_star = fp.sigma_star = nan;
        }
        fp.status = r.status;
        for (const auto& w : r.warnings) fp.message += (fp.message.empty() ? "" : "; ") + w;
        out.push_back(std::move(fp));
    }
    return out;
}

TangentResult tangent_portfolio(std::span<const FrontierPoint> frontier, double zeta_f) {
    TangentResult best;
    best.zeta_f = zeta_f;
    bool found = false;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
        const auto& fp = frontier[k];
        if (fp.status != SolveStatus::Optimal || !(fp.risk_z > 0.0) || !std::isfinite(fp.mean_z)) continue;
        const double slope = (fp.mean_z - zeta_f) / fp.risk_z;
        if (!std::isfinite(slope)) continue;
        if (!found || slope > best.slope || (slope == best.slope && fp.risk_z < best.point.risk_z)) {
            best.point = fp;
            best.index = k;
            best.slope = slope;
            found = true;
        }
    }
    if (!found) throw NoTangent("no frontier point with positive risk and a finite slope");
    best.below_riskless = best.slope < 0.0;
    return best;
}

RealizedSeries realize_series(const WeightSchedule& schedule, const ReturnPanel& returns,
                              const EsgPanel& daily_scores, const EsgBlendParams& p, double p0,
                              const Eigen::VectorXd* cost_log) {
    p.validate();
    const auto n = schedule.dates.size();
    const auto I = static_cast<Eigen::Index>(returns.assets());
    if (schedule.weights.rows() != static_cast<Eigen::Index>(n) || schedule.weights.cols() != I)
        throw AlignmentError("weight schedule shape does not match its dates and the return panel");
    if (daily_scores.tickers != returns.tickers) throw AlignmentError("score and return tickers differ");
    if (cost_log && cost_log->size() != static_cast<Eigen::Index>(n))
        throw AlignmentError("cost vector length does not match the weight schedule");
    if (!(p0 > 0.0)) throw DomainError("initial price must be positive");

    RealizedSeries out;
    out.dates.reserve(n);
    out.realized_r.resize(static_cast<Eigen::Index>(n));
    out.realized_z.resize(static_cast<Eigen::Index>(n));
    out.price.resize(static_cast<Eigen::Index>(n));
    out.esg_price.resize(static_cast<Eigen::Index>(n));
    out.esg_score.resize(static_cast<Eigen::Index>(n));
    out.sigma_star.resize(static_cast<Eigen::Index>(n));
    double cum_r = 0.0, cum_z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto idx = returns.calendar.index_of(schedule.dates[k]);
        if (idx < 0 || static_cast<std::size_t>(idx) + 1 >= returns.periods())
            throw AlignmentError("no next trading day after " + format_date(schedule.dates[k]));
        const Date next = returns.calendar.dates[static_cast<std::size_t>(idx) + 1];
        const auto it = std::lower_bound(daily_scores.dates.begin(), daily_scores.dates.end(), next);
        if (it == daily_scores.dates.end() || *it != next)
            throw AlignmentError("no ESG score on " + format_date(next));
        const auto srow = static_cast<Eigen::Index>(it - daily_scores.dates.begin());

        const auto ek = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd theta = schedule.weights.row(ek).transpose();
        double rr = 0.0, zz = 0.0;
        for (Eigen::Index i = 0; i < I; ++i) {
            const double r = returns.returns(idx + 1, i);
            rr += theta(i) * r;
            zz += theta(i) * esg_valued_return(r, daily_scores.normalized(srow, i), p);
        }
        if (cost_log) {
            rr += (*cost_log)(ek);
            zz += (1.0 - p.lambda) * (*cost_log)(ek);
        }
        cum_r += rr;
        cum_z += zz;
        out.dates.push_back(next);
        out.realized_r(ek) = rr;
        out.realized_z(ek) = zz;
        out.price(ek) = p0 * std::exp(cum_r);
        out.esg_price(ek) = std::exp(cum_z);
        out.esg_score(ek) = theta.dot(daily_scores.raw.row(srow).transpose());
        out.sigma_star(ek) = theta.dot(daily_scores.normalized.row(srow).transpose());
    }
    return out;
}

}  // namespace esgport
