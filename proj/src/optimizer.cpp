#include "esgport/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "esgport/error.hpp"
#include "lp_simplex.hpp"
#include "qp_ipm.hpp"

namespace esgport {

namespace {

constexpr double kBudgetTol = 1e-8;
constexpr double kProximal = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool turnover_active(const OptimizationSpec& spec) { return spec.gamma.has_value(); }

Eigen::VectorXd reference(const OptimizationSpec& spec, Eigen::Index I) {
    return spec.prev_weights.size() == I ? spec.prev_weights : Eigen::VectorXd::Zero(I);
}

/// Smallest L1 move from theta_bar onto the long-only simplex.
bool turnover_feasible(const OptimizationSpec& spec) {
    if (!turnover_active(spec) || spec.allow_short) return true;
    const double neg = (-spec.prev_weights.array()).max(0.0).sum();
    return *spec.gamma >= 2.0 * neg - 1e-12;
}

SolveReport infeasible_report(Eigen::Index I, const std::string& why) {
    SolveReport r;
    r.weights = Eigen::VectorXd::Constant(I, std::numeric_limits<double>::quiet_NaN());
    r.status = SolveStatus::Infeasible;
    r.objective = std::numeric_limits<double>::quiet_NaN();
    r.warnings.push_back(why);
    return r;
}

/// Clears solver noise: tiny negatives under long-only, then exact budget.
void clean_weights(Eigen::VectorXd& theta, const OptimizationSpec& spec, std::vector<std::string>& warnings) {
    if (!spec.allow_short) {
        if (theta.minCoeff() < -1e-7) warnings.push_back("long-only bound violated by " + std::to_string(-theta.minCoeff()));
        theta = theta.cwiseMax(0.0);
    }
    const double s = theta.sum();
    if (std::abs(s - 1.0) > 1e-6) warnings.push_back("budget residual " + std::to_string(s - 1.0));
    if (s != 0.0) theta /= s;
}

}  // namespace

const char* to_string(RiskMeasure r) noexcept { return r == RiskMeasure::MeanVariance ? "mv" : "mcvar"; }

RiskMeasure parse_risk_measure(const std::string& s) {
    if (s == "mv") return RiskMeasure::MeanVariance;
    if (s == "mcvar") return RiskMeasure::MeanCvar;
    throw DomainError("unknown risk measure '" + s + "' (expected mv or mcvar)");
}

const char* to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::NumericLimit: return "NumericLimit";
    }
    return "?";
}

void OptimizationSpec::validate(Eigen::Index assets) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1], got " + std::to_string(alpha));
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1), got " + std::to_string(beta));
    if (prev_weights.size() != 0 && prev_weights.size() != assets)
        throw ShapeError("previous weights have " + std::to_string(prev_weights.size()) + " entries, expected " +
                         std::to_string(assets));
    if (prev_weights.size() != 0 && !prev_weights.allFinite()) throw DomainError("previous weights are not finite");
    if (gamma) {
        if (!(*gamma >= 0.0)) throw DomainError("turnover cap gamma must be non-negative");
        if (prev_weights.size() == 0) throw DomainError("turnover cap requires previous weights");
        if (std::abs(prev_weights.sum() - 1.0) > kBudgetTol)
            throw DomainError("previous weights must sum to 1 when the turnover cap is active");
    }
}

double sample_cvar(const Eigen::Ref<const Eigen::VectorXd>& x, double beta) {
    const auto S = x.size();
    const double k = (1.0 - beta) * static_cast<double>(S);
    if (S == 0 || k < 1.0 - 1e-12) throw SampleTooSmall("CVaR needs (1-beta)*S >= 1");
    std::vector<double> loss(static_cast<std::size_t>(S));
    for (Eigen::Index s = 0; s < S; ++s) loss[static_cast<std::size_t>(s)] = -x(s);
    const auto whole = static_cast<std::size_t>(std::floor(k + 1e-9));
    const std::size_t need = std::min<std::size_t>(whole + 1, loss.size());
    std::partial_sort(loss.begin(), loss.begin() + static_cast<std::ptrdiff_t>(need), loss.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < whole; ++i) sum += loss[i];
    const double frac = k - static_cast<double>(whole);
    if (frac > 0.0 && whole < loss.size()) sum += frac * loss[whole];
    return sum / k;
}

SolveReport solve_mv(const Eigen::VectorXd& mu, const Eigen::MatrixXd& Sigma, const OptimizationSpec& spec) {
    const Eigen::Index I = mu.size();
    if (I == 0) throw ShapeError("empty asset universe");
    if (Sigma.rows() != I || Sigma.cols() != I)
        throw ShapeError("covariance is " + std::to_string(Sigma.rows()) + "x" + std::to_string(Sigma.cols()) +
                         ", expected " + std::to_string(I) + "x" + std::to_string(I));
    if (!mu.allFinite() || !Sigma.allFinite()) throw DomainError("non-finite mean or covariance");
    spec.validate(I);
    if (!turnover_feasible(spec)) return infeasible_report(I, "turnover cap too small to reach the long-only simplex");

    SolveReport rep;
    Eigen::MatrixXd S = 0.5 * (Sigma + Sigma.transpose());
    {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        if (es.eigenvalues().minCoeff() < 0.0) {
            const double ridge = 1e-10 * std::max(S.trace(), 0.0) / static_cast<double>(I);
            S = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
            S.diagonal().array() += ridge;
            rep.warnings.push_back("covariance repaired to positive semidefinite");
        }
    }
    const Eigen::VectorXd theta_bar = reference(spec, I);

    if (spec.gamma && *spec.gamma <= 1e-12) {
        rep.weights = spec.prev_weights;
    } else {
        const double a = spec.alpha;
        double scale = std::max(a * mu.lpNorm<Eigen::Infinity>(), 2.0 * (1.0 - a) * S.cwiseAbs().maxCoeff());
        if (!(scale > 0.0)) scale = 1.0;
        Eigen::MatrixXd Q = 2.0 * (1.0 - a) / scale * S;
        Q.diagonal().array() += 2.0 * kProximal;
        Eigen::VectorXd c = -a / scale * mu - 2.0 * kProximal * theta_bar;

        const Eigen::Index nt = spec.allow_short ? 2 * I : I;
        const bool cap = turnover_active(spec);
        const Eigen::Index n = nt + (cap ? 2 * I + 1 : 0);
        const Eigen::Index m = 1 + (cap ? I + 1 : 0);
        detail::QpProblem qp;
        qp.Q = Eigen::MatrixXd::Zero(n, n);
        qp.c = Eigen::VectorXd::Zero(n);
        qp.A = Eigen::MatrixXd::Zero(m, n);
        qp.b = Eigen::VectorXd::Zero(m);
        qp.Q.topLeftCorner(I, I) = Q;
        qp.c.head(I) = c;
        qp.A.block(0, 0, 1, I).setOnes();
        if (spec.allow_short) {
            qp.Q.block(0, I, I, I) = -Q;
            qp.Q.block(I, 0, I, I) = -Q;
            qp.Q.block(I, I, I, I) = Q;
            qp.Q.diagonal().segment(0, 2 * I).array() += 2.0 * kProximal;
            qp.c.segment(I, I) = -c;
            qp.A.block(0, I, 1, I).setConstant(-1.0);
        }
        qp.b(0) = 1.0;
        if (cap) {
            for (Eigen::Index i = 0; i < I; ++i) {
                qp.A(1 + i, i) = 1.0;
                if (spec.allow_short) qp.A(1 + i, I + i) = -1.0;
                qp.A(1 + i, nt + i) = -1.0;
                qp.A(1 + i, nt + I + i) = 1.0;
                qp.b(1 + i) = theta_bar(i);
            }
            qp.A.block(1 + I, nt, 1, 2 * I + 1).setOnes();
            qp.b(1 + I) = *spec.gamma;
        }
        const auto res = detail::solve_qp(qp);
        rep.iterations = res.iterations;
        rep.duality_gap = res.gap * scale;
        rep.weights = res.x.head(I);
        if (spec.allow_short) rep.weights -= res.x.segment(I, I);
        if (!res.converged) {
            rep.status = SolveStatus::NumericLimit;
            rep.warnings.push_back("interior point method did not reach tolerance");
        }
        if (!rep.weights.allFinite()) {
            rep.status = SolveStatus::NumericLimit;
            rep.objective = std::numeric_limits<double>::quiet_NaN();
            return rep;
        }
        clean_weights(rep.weights, spec, rep.warnings);
        if (res.converged) rep.status = SolveStatus::Optimal;
    }
    if (spec.gamma && *spec.gamma <= 1e-12) rep.status = SolveStatus::Optimal;
    rep.mean = rep.weights.dot(mu);
    rep.risk = rep.weights.dot(S * rep.weights);
    rep.objective = -spec.alpha * rep.mean + (1.0 - spec.alpha) * rep.risk;
    return rep;
}

SolveReport solve_mcvar(const Eigen::MatrixXd& scenarios, const OptimizationSpec& spec) {
    const Eigen::Index S = scenarios.rows();
    const Eigen::Index I = scenarios.cols();
    if (I == 0 || S == 0) throw ShapeError("empty scenario matrix");
    if (!scenarios.allFinite()) throw DomainError("non-finite scenario value");
    spec.validate(I);
    const double tail = (1.0 - spec.beta) * static_cast<double>(S);
    if (tail < 1.0 - 1e-12 || spec.beta * static_cast<double>(S) < 1.0 - 1e-12)
        throw SampleTooSmall("need beta*S >= 1 and (1-beta)*S >= 1, got S=" + std::to_string(S));
    if (!turnover_feasible(spec)) return infeasible_report(I, "turnover cap too small to reach the long-only simplex");

    SolveReport rep;
    if (tail < 10.0) rep.warnings.push_back("DegenerateTail: (1-beta)*S < 10");
    const Eigen::VectorXd mu = scenarios.colwise().mean().transpose();

    if (spec.gamma && *spec.gamma <= 1e-12) {
        rep.weights = spec.prev_weights;
        rep.status = SolveStatus::Optimal;
    } else {
        double scale = scenarios.cwiseAbs().maxCoeff();
        if (!(scale > 0.0)) scale = 1.0;
        const Eigen::MatrixXd Z = scenarios / scale;
        const Eigen::VectorXd mz = Z.colwise().mean().transpose();
        const double a = spec.alpha;
        const double kappa = (1.0 - a) / tail;
        const bool cap = turnover_active(spec);
        const Eigen::VectorXd theta_bar = reference(spec, I);

        // Columns: pi (S) | nu | slack per asset row (long-only) | rho (I) | tau | t (2I)
        const Eigen::Index c_nu = S;
        const Eigen::Index c_slack = S + 1;
        const Eigen::Index n_slack = spec.allow_short ? 0 : I;
        const Eigen::Index c_rho = c_slack + n_slack;
        const Eigen::Index c_tau = c_rho + I;
        const Eigen::Index c_t = c_tau + 1;
        const Eigen::Index n = cap ? c_t + 2 * I : c_rho;
        const Eigen::Index m = 1 + I + (cap ? 2 * I : 0);

        detail::LpProblem lp;
        lp.A = Eigen::MatrixXd::Zero(m, n);
        lp.b = Eigen::VectorXd::Zero(m);
        lp.c = Eigen::VectorXd::Zero(n);
        lp.lower = Eigen::VectorXd::Zero(n);
        lp.upper = Eigen::VectorXd::Constant(n, kInf);

        lp.A.block(0, 0, 1, S).setOnes();
        lp.A.block(1, 0, I, S) = Z.transpose();
        lp.upper.head(S).setConstant(kappa);
        lp.b(0) = 1.0 - a;
        lp.b.segment(1, I) = -a * mz;
        lp.A.block(1, c_nu, I, 1).setOnes();
        lp.lower(c_nu) = -kInf;
        lp.c(c_nu) = -1.0;
        for (Eigen::Index i = 0; i < n_slack; ++i) lp.A(1 + i, c_slack + i) = 1.0;
        if (cap) {
            for (Eigen::Index i = 0; i < I; ++i) {
                const Eigen::Index r_lo = 1 + I + i;
                const Eigen::Index r_hi = 1 + 2 * I + i;
                lp.A(1 + i, c_rho + i) = 1.0;
                lp.A(r_lo, c_rho + i) = -1.0;
                lp.A(r_hi, c_rho + i) = 1.0;
                lp.A(r_lo, c_tau) = -1.0;
                lp.A(r_hi, c_tau) = -1.0;
                lp.A(r_lo, c_t + i) = 1.0;
                lp.A(r_hi, c_t + I + i) = 1.0;
                lp.lower(c_rho + i) = -kInf;
                lp.c(c_rho + i) = -theta_bar(i);
            }
            lp.c(c_tau) = *spec.gamma;
        }

        const auto res = detail::solve_lp(lp);
        rep.iterations = res.iterations;
        switch (res.status) {
            case detail::LpStatus::Optimal: rep.status = SolveStatus::Optimal; break;
            case detail::LpStatus::Unbounded:
                return infeasible_report(I, "dual unbounded: constraints admit no portfolio");
            case detail::LpStatus::Infeasible:
                rep.status = SolveStatus::NumericLimit;
                rep.warnings.push_back("dual infeasible: objective unbounded below");
                rep.weights = Eigen::VectorXd::Constant(I, std::numeric_limits<double>::quiet_NaN());
                rep.objective = std::numeric_limits<double>::quiet_NaN();
                return rep;
            case detail::LpStatus::IterationLimit:
                rep.status = SolveStatus::NumericLimit;
                rep.warnings.push_back("simplex iteration limit");
                break;
        }
        rep.weights = -res.y.segment(1, I);
        clean_weights(rep.weights, spec, rep.warnings);
        rep.duality_gap = -res.objective * scale;  // dual objective, replaced by the gap below
    }
    rep.mean = rep.weights.dot(mu);
    rep.risk = sample_cvar(scenarios * rep.weights, spec.beta);
    rep.objective = -spec.alpha * rep.mean + (1.0 - spec.alpha) * rep.risk;
    if (!(spec.gamma && *spec.gamma <= 1e-12)) rep.duality_gap = rep.objective - rep.duality_gap;
    return rep;
}

SolveReport solve(const Eigen::MatrixXd& scenarios, const OptimizationSpec& spec) {
    if (spec.risk == RiskMeasure::MeanCvar) return solve_mcvar(scenarios, spec);
    if (scenarios.rows() == 0 || scenarios.cols() == 0) throw ShapeError("empty scenario matrix");
    const Eigen::VectorXd mu = scenarios.colwise().mean().transpose();
    const Eigen::MatrixXd centered = scenarios.rowwise() - mu.transpose();
    const double denom = std::max<double>(1.0, static_cast<double>(scenarios.rows() - 1));
    const Eigen::MatrixXd cov = centered.transpose() * centered / denom;
    return solve_mv(mu, cov, spec);
}

std::vector<SolveReport> sweep_alpha(const Eigen::MatrixXd& scenarios, std::span<const double> alpha_grid,
                                     const OptimizationSpec& spec_template) {
    if (alpha_grid.empty()) throw DomainError("alpha grid is empty");
    for (double a : alpha_grid)
        if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha grid value outside [0,1]");
    std::vector<SolveReport> out;
    out.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        OptimizationSpec spec = spec_template;
        spec.alpha = a;
        try {
            out.push_back(solve(scenarios, spec));
        } catch (const Error& e) {
            SolveReport r;
            r.status = SolveStatus::NumericLimit;
            r.weights = Eigen::VectorXd::Constant(scenarios.cols(), std::numeric_limits<double>::quiet_NaN());
            r.objective = std::numeric_limits<double>::quiet_NaN();
            r.warnings.push_back(e.kind() + ": " + e.what());
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<SolveReport> sweep_alpha(const Eigen::MatrixXd& raw_scenarios, const Eigen::VectorXd& scores,
                                     const EsgBlendParams& params, std::span<const double> alpha_grid,
                                     const OptimizationSpec& spec_template) {
    return sweep_alpha(blend_scenarios(raw_scenarios, scores, params), alpha_grid, spec_template);
}

std::vector<double> make_grid(double a, double step, double b) {
    if (!(step > 0.0) || !std::isfinite(a) || !std::isfinite(b) || b < a)
        throw DomainError("grid needs finite a <= b and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> g(count);
    for (std::size_t k = 0; k < count; ++k) g[k] = std::round((a + static_cast<double>(k) * step) * 1e12) / 1e12;
    return g;
}

}  // namespace esgport
