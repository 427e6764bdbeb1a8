#include "esgport/scenario_engine.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "bfgs.hpp"
#include "esgport/error.hpp"

namespace esgport {

namespace {

constexpr int kConditioning = 2;  // observations held back so every order sees the same sample
constexpr double kMaxPersistence = 0.9999;

/// Maps unconstrained reals to AR coefficients in the stationarity region via
/// partial autocorrelations (Durbin-Levinson recursion).
std::vector<double> pacf_to_coefficients(std::span<const double> u) {
    std::vector<double> phi;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double r = std::tanh(u[k]);
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
        next[k] = r;
        phi = std::move(next);
    }
    return phi;
}

struct ArmaModel {
    int p;
    int q;
    double mu;
    std::vector<double> phi;
    std::vector<double> theta;
};

ArmaModel decode_arma(const Eigen::VectorXd& x, int p, int q, double scale) {
    ArmaModel m{p, q, x(0) * scale, {}, {}};
    std::vector<double> u(x.data() + 1, x.data() + 1 + p);
    m.phi = pacf_to_coefficients(u);
    std::vector<double> v(x.data() + 1 + p, x.data() + 1 + p + q);
    m.theta = pacf_to_coefficients(v);
    for (auto& t : m.theta) t = -t;  // 1 + theta(z) invertible iff 1 - (-theta)(z) stationary
    return m;
}

/// Conditional-sum-of-squares residuals for t >= kConditioning.
void arma_residuals(const ArmaModel& m, std::span<const double> r, std::vector<double>& e) {
    const std::size_t n = r.size();
    e.assign(n, 0.0);
    for (std::size_t t = kConditioning; t < n; ++t) {
        double pred = m.mu;
        for (int k = 0; k < m.p; ++k) pred += m.phi[k] * (r[t - 1 - k] - m.mu);
        for (int k = 0; k < m.q; ++k) pred += m.theta[k] * e[t - 1 - k];
        e[t] = r[t] - pred;
    }
}

double concentrated_loglik(const std::vector<double>& e) {
    const double n = static_cast<double>(e.size() - kConditioning);
    double ss = 0.0;
    for (std::size_t t = kConditioning; t < e.size(); ++t) ss += e[t] * e[t];
    const double s2 = ss / n;
    if (!(s2 > 0.0) || !std::isfinite(s2)) return -std::numeric_limits<double>::infinity();
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

struct GarchParams {
    double omega;
    double a1;
    double b1;
};

GarchParams decode_garch(const Eigen::VectorXd& x, double var) {
    const double persistence = kMaxPersistence / (1.0 + std::exp(-x(1)));
    const double share = 1.0 / (1.0 + std::exp(-x(2)));
    return {var * std::exp(x(0)), persistence * share, persistence * (1.0 - share)};
}

Eigen::VectorXd encode_garch(double omega_rel, double a1, double b1) {
    const double persistence = a1 + b1;
    Eigen::VectorXd x(3);
    x(0) = std::log(omega_rel);
    const double pr = persistence / kMaxPersistence;
    x(1) = std::log(pr / (1.0 - pr));
    const double share = a1 / persistence;
    x(2) = std::log(share / (1.0 - share));
    return x;
}

/// Gaussian log-likelihood of residuals e[t], t >= kConditioning, with the
/// recursion started at the sample variance. Fills sigma2 when non-null.
double garch_loglik(const GarchParams& g, const std::vector<double>& e, double var, std::vector<double>* sigma2) {
    double s2 = var;
    double ll = 0.0;
    double prev_e2 = var;
    if (sigma2) sigma2->assign(e.size(), var);
    for (std::size_t t = kConditioning; t < e.size(); ++t) {
        if (t > kConditioning) s2 = g.omega + g.a1 * prev_e2 + g.b1 * s2;
        if (!(s2 > 0.0) || !std::isfinite(s2)) return -std::numeric_limits<double>::infinity();
        ll += -0.5 * (std::log(2.0 * std::numbers::pi * s2) + e[t] * e[t] / s2);
        prev_e2 = e[t] * e[t];
        if (sigma2) (*sigma2)[t] = s2;
    }
    return ll;
}

}  // namespace

double ArmaGarchFit::next_mean() const {
    double m = mu;
    for (int k = 0; k < p; ++k) m += phi[k] * (recent_returns[k] - mu);
    for (int k = 0; k < q; ++k) m += theta[k] * recent_residuals[k];
    return m;
}

double ArmaGarchFit::next_variance() const {
    if (!garch_active) return residual_variance;
    const double e = recent_residuals.empty() ? 0.0 : recent_residuals[0];
    return omega + a1 * e * e + b1 * last_variance;
}

void ArmaGarchFit::check_invariants() const {
    if (static_cast<int>(phi.size()) != p || static_cast<int>(theta.size()) != q)
        throw FitError("ARMA coefficient count does not match order");
    if (garch_active && !(omega > 0.0 && a1 >= 0.0 && b1 >= 0.0 && a1 + b1 < 1.0))
        throw FitError("GARCH coefficients violate covariance stationarity");
    auto stable = [](std::span<const double> c, double sign) {
        // roots of 1 - sign*c1 z - sign*c2 z^2 outside the unit circle
        if (c.empty()) return true;
        const double c1 = sign * c[0];
        const double c2 = c.size() > 1 ? sign * c[1] : 0.0;
        return std::abs(c2) < 1.0 && c2 + c1 < 1.0 && c2 - c1 < 1.0;
    };
    if (!stable(phi, 1.0)) throw FitError("AR polynomial has a root inside the unit circle");
    if (!stable(theta, -1.0)) throw FitError("MA polynomial has a root inside the unit circle");
}

std::pair<double, double> ljung_box(std::span<const double> x, int lag) {
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(lag) + 1) throw SampleTooSmall("series too short for Ljung-Box test");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (!(denom > 0.0)) return {0.0, 1.0};
    double q = 0.0;
    for (int k = 1; k <= lag; ++k) {
        double num = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) num += (x[t] - mean) * (x[t - k] - mean);
        const double rho = num / denom;
        q += rho * rho / static_cast<double>(n - static_cast<std::size_t>(k));
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    const boost::math::chi_squared chi2(lag);
    return {q, boost::math::cdf(boost::math::complement(chi2, q))};
}

ArmaGarchFit fit_arma_garch(std::span<const double> series, const OrderGrid& grid, const FitOptions& opts) {
    const std::size_t n = series.size();
    if (n < opts.min_window || n < 20)
        throw WindowTooShort("ARMA-GARCH fit needs at least " + std::to_string(opts.min_window) +
                             " observations, got " + std::to_string(n));
    for (double v : series)
        if (!std::isfinite(v)) throw FitError("non-finite value in return window");

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    if (!(var > 1e-300) || std::sqrt(var) <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw FitError("return window has zero variance");

    const double scale = std::sqrt(var);  // mean parameter is optimized in units of the sample sd
    const double n_eff = static_cast<double>(n - kConditioning);
    RandomStream rng(opts.seed, 0x5eed);

    ArmaGarchFit best;
    best.bic = std::numeric_limits<double>::infinity();
    ArmaModel best_model{};
    std::vector<double> e;
    for (int p = 0; p <= grid.max_p; ++p) {
        for (int q = 0; q <= grid.max_q; ++q) {
            CandidateDiagnostic diag{p, q, 0.0, 0.0, false, {}};
            const int k = 1 + p + q;
            auto objective = [&](const Eigen::VectorXd& x) {
                std::vector<double> res;
                arma_residuals(decode_arma(x, p, q, scale), series, res);
                return -concentrated_loglik(res);
            };
            detail::MinimizeResult bestrun;
            const int starts = (p + q == 0) ? 1 : 3;
            for (int s = 0; s < starts; ++s) {
                Eigen::VectorXd x0 = Eigen::VectorXd::Zero(k);
                x0(0) = mean / scale;
                if (s > 0)
                    for (int j = 1; j < k; ++j) x0(j) = 0.6 * (2.0 * rng.uniform() - 1.0);
                detail::MinimizeResult run;
                if (p + q == 0) {
                    run.x = x0;
                    run.value = objective(x0);
                    run.converged = std::isfinite(run.value);
                } else {
                    run = detail::minimize_bfgs(objective, x0, opts.ll_tol);
                }
                if (std::isfinite(run.value) && (!std::isfinite(bestrun.value) || run.value < bestrun.value))
                    bestrun = run;
            }
            if (!std::isfinite(bestrun.value)) {
                diag.message = "likelihood not finite";
                best.diagnostics.push_back(diag);
                continue;
            }
            diag.loglik = -bestrun.value;
            diag.bic = -2.0 * diag.loglik + static_cast<double>(k + 1) * std::log(n_eff);
            diag.converged = bestrun.converged;
            if (!bestrun.converged) diag.message = "quasi-Newton iteration limit";
            best.diagnostics.push_back(diag);
            if (diag.bic < best.bic) {
                best.bic = diag.bic;
                best.loglik = diag.loglik;
                best.p = p;
                best.q = q;
                best_model = decode_arma(bestrun.x, p, q, scale);
            }
        }
    }
    if (!std::isfinite(best.bic)) throw FitError("every ARMA candidate failed");

    best.mu = best_model.mu;
    best.phi = best_model.phi;
    best.theta = best_model.theta;
    arma_residuals(best_model, series, e);

    double evar = 0.0;
    for (std::size_t t = kConditioning; t < n; ++t) evar += e[t] * e[t];
    evar /= n_eff;
    best.residual_variance = evar;

    // GARCH(1,1) on the ARMA residuals.
    auto garch_objective = [&](const Eigen::VectorXd& x) { return -garch_loglik(decode_garch(x, evar), e, evar, nullptr); };
    detail::MinimizeResult grun;
    for (int s = 0; s <= opts.restarts; ++s) {
        Eigen::VectorXd x0;
        if (s == 0) {
            x0 = encode_garch(0.05, 0.05, 0.90);
        } else {
            const double persistence = 0.5 + 0.49 * rng.uniform();
            const double a = persistence * (0.02 + 0.3 * rng.uniform());
            x0 = encode_garch(1.0 - persistence, a, persistence - a);
        }
        auto run = detail::minimize_bfgs(garch_objective, x0, opts.ll_tol);
        if (std::isfinite(run.value) && (!std::isfinite(grun.value) || run.value < grun.value)) grun = run;
    }
    const double const_ll = -0.5 * n_eff * (std::log(2.0 * std::numbers::pi * evar) + 1.0);
    bool keep_garch = false;
    GarchParams g{evar, 0.0, 0.0};
    if (std::isfinite(grun.value)) {
        g = decode_garch(grun.x, evar);
        best.garch_converged = grun.converged;
        const double bic_garch = 2.0 * grun.value + 3.0 * std::log(n_eff);
        const double bic_const = -2.0 * const_ll + std::log(n_eff);
        keep_garch = grun.converged && bic_garch < bic_const;
    }
    std::vector<double> sq;
    sq.reserve(n - kConditioning);
    for (std::size_t t = kConditioning; t < n; ++t) sq.push_back(e[t] * e[t]);
    const auto [lb_stat, lb_p] = ljung_box(sq, opts.ljung_box_lag);
    best.ljung_box_stat = lb_stat;
    best.ljung_box_pvalue = lb_p;
    if (!keep_garch && std::isfinite(grun.value) && lb_p < opts.ljung_box_level) keep_garch = true;

    best.garch_active = keep_garch;
    std::vector<double> sigma2;
    if (keep_garch) {
        best.omega = g.omega;
        best.a1 = g.a1;
        best.b1 = g.b1;
        garch_loglik(g, e, evar, &sigma2);
    } else {
        sigma2.assign(n, evar);
    }

    best.standardized_residuals.reserve(n - kConditioning);
    for (std::size_t t = kConditioning; t < n; ++t) best.standardized_residuals.push_back(e[t] / std::sqrt(sigma2[t]));
    for (int k = 0; k < best.p; ++k) best.recent_returns.push_back(series[n - 1 - k]);
    for (int k = 0; k < std::max(best.q, 1); ++k) best.recent_residuals.push_back(e[n - 1 - k]);
    best.last_variance = sigma2[n - 1];
    best.check_invariants();
    return best;
}

ScenarioMatrix simulate_one_step(std::span<const ArmaGarchFit> fits, const NigParams& joint, std::size_t S,
                                 std::uint64_t seed) {
    const auto I = static_cast<Eigen::Index>(fits.size());
    if (joint.dim() != I)
        throw ShapeError("joint NIG dimension " + std::to_string(joint.dim()) + " does not match " +
                         std::to_string(I) + " fitted assets");
    if (S < 1) throw DomainError("scenario count must be positive");
    const NigSampler sampler(joint);
    Eigen::VectorXd mean(I), sd(I);
    for (Eigen::Index i = 0; i < I; ++i) {
        mean(i) = fits[i].next_mean();
        sd(i) = std::sqrt(fits[i].next_variance());
    }
    ScenarioMatrix out;
    out.seed = seed;
    out.values.resize(static_cast<Eigen::Index>(S), I);
    Eigen::VectorXd z(I);
    for (std::size_t s = 0; s < S; ++s) {
        RandomStream rng(seed, s);
        sampler.draw(rng, z);
        out.values.row(static_cast<Eigen::Index>(s)) = (mean.array() + sd.array() * z.array()).transpose();
    }
    return out;
}

TrajectoryEnsemble simulate_trajectories(const ArmaGarchFit& fit, const NigParams& nig, int horizon, std::size_t S,
                                         std::uint64_t seed, const TrajectoryBlend& blend) {
    if (nig.dim() != 1) throw ShapeError("trajectory simulation needs a one-dimensional NIG");
    if (horizon < 1 || S < 1) throw DomainError("horizon and path count must be positive");
    constexpr double kMaxCumulative = 50.0;
    constexpr std::uint64_t kMaxAttempts = 1000;
    const NigSampler sampler(nig);
    TrajectoryEnsemble out;
    out.seed = seed;
    out.returns.resize(static_cast<Eigen::Index>(S), horizon);
    Eigen::VectorXd z(1);
    const std::size_t nr = static_cast<std::size_t>(fit.p);
    const std::size_t ne = fit.recent_residuals.size();
    std::vector<double> rr(nr), ee(ne);
    for (std::size_t s = 0; s < S; ++s) {
        bool ok = false;
        for (std::uint64_t attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
            RandomStream rng(seed, (attempt << 40) | s);
            std::copy(fit.recent_returns.begin(), fit.recent_returns.end(), rr.begin());
            std::copy(fit.recent_residuals.begin(), fit.recent_residuals.end(), ee.begin());
            double s2 = fit.last_variance;
            double cum = 0.0;
            ok = true;
            for (int k = 0; k < horizon; ++k) {
                double m = fit.mu;
                for (std::size_t j = 0; j < nr; ++j) m += fit.phi[j] * (rr[j] - fit.mu);
                for (int j = 0; j < fit.q; ++j) m += fit.theta[j] * ee[j];
                s2 = fit.garch_active ? fit.omega + fit.a1 * ee[0] * ee[0] + fit.b1 * s2 : fit.residual_variance;
                sampler.draw(rng, z);
                const double e = std::sqrt(s2) * z(0);
                const double r = m + e;
                cum += r;
                if (!std::isfinite(r) || std::abs(cum) > kMaxCumulative) {
                    ok = false;
                    ++out.redraws;
                    break;
                }
                out.returns(static_cast<Eigen::Index>(s), k) = r;
                if (nr > 0) {
                    std::copy_backward(rr.begin(), rr.end() - 1, rr.end());
                    rr[0] = r;
                }
                std::copy_backward(ee.begin(), ee.end() - 1, ee.end());
                ee[0] = e;
            }
        }
        if (!ok) throw FitError("trajectory simulation kept exceeding the cumulative return guard");
    }
    out.esg_prices = esg_price_paths(out.returns, blend);
    return out;
}

PathMatrix esg_price_paths(const PathMatrix& returns, const TrajectoryBlend& blend) {
    blend.params.validate();
    if (!(blend.spot > 0.0)) throw DomainError("spot must be positive");
    PathMatrix out(returns.rows(), returns.cols());
    const double shift = blend.params.lambda * blend.score / blend.params.c;
    const double scale = 1.0 - blend.params.lambda;
    for (Eigen::Index s = 0; s < returns.rows(); ++s) {
        double cum = 0.0;
        for (Eigen::Index k = 0; k < returns.cols(); ++k) {
            cum += shift + scale * returns(s, k);
            out(s, k) = blend.spot * std::exp(cum);
        }
    }
    return out;
}

}  // namespace esgport
