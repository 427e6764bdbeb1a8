#include "esgport/nig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "esgport/error.hpp"

namespace esgport {

namespace {

constexpr double kLambda = -0.5;  // GIG index of the inverse Gaussian mixing law

struct Posterior {
    Eigen::VectorXd inv_w;  // E[1/W | x]
    Eigen::VectorXd w;      // E[W | x]
    double loglik = 0.0;
};

/// e^x K_{m0+k}(x) for k = 0..count-1 with m0 in {0, 1/2}, by upward
/// recurrence from the two lowest orders.
void scaled_bessel_k_ladder(double m0, double x, int count, double* out) {
    double k0, k1;
    if (m0 != 0.0) {
        k0 = std::sqrt(std::numbers::pi / (2.0 * x));
        k1 = k0 * (1.0 + 1.0 / x);
    } else if (x < 500.0) {
        k0 = boost::math::cyl_bessel_k(0, x) * std::exp(x);
        k1 = boost::math::cyl_bessel_k(1, x) * std::exp(x);
    } else {
        k0 = std::exp(log_bessel_k(0.0, x) + x);
        k1 = std::exp(log_bessel_k(1.0, x) + x);
    }
    out[0] = k0;
    if (count > 1) out[1] = k1;
    for (int k = 2; k < count; ++k) out[k] = out[k - 2] + 2.0 * (m0 + k - 1) / x * out[k - 1];
}

/// Per-row conditional moments of the mixing variable and the sample
/// log-likelihood, for parameters with E[W] = 1.
Posterior posterior(const NigParams& p, const Eigen::MatrixXd& x) {
    const auto n = x.rows();
    const auto d = p.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(p.scale);
    if (llt.info() != Eigen::Success) throw SingularError("NIG scale matrix not positive definite");
    const Eigen::VectorXd sinv_g = llt.solve(p.skewness);
    const double g = p.skewness.dot(sinv_g);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double nu = kLambda - 0.5 * static_cast<double>(d);
    const double ab = p.alpha_bar;
    const double b = ab + g;
    const double log_c = (0.5 * static_cast<double>(d) - kLambda) * std::log(b) -
                         0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det -
                         log_bessel_k(kLambda, ab);

    // K is even in its order, so orders |nu| - 1, |nu|, |nu| + 1 are needed.
    const double m = std::abs(nu);
    const double m0 = m - std::floor(m);
    const int top = static_cast<int>(std::lround(m - m0)) + 1;
    std::vector<double> ladder(static_cast<std::size_t>(top) + 1);

    Posterior out;
    out.inv_w.resize(n);
    out.w.resize(n);
    Eigen::MatrixXd diff = x.rowwise() - p.location.transpose();
    const Eigen::MatrixXd sinv_diff = llt.solve(diff.transpose());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double q = diff.row(i).dot(sinv_diff.col(i));
        const double a = ab + q;
        const double arg = std::sqrt(a * b);
        scaled_bessel_k_ladder(m0, arg, top + 1, ladder.data());
        const double k_mid = ladder[static_cast<std::size_t>(top - 1)];
        const double k_up = ladder[static_cast<std::size_t>(top)];
        // For |nu| < 1 the order |nu| - 1 reflects onto 1 - |nu|.
        const double k_down = top >= 2 ? ladder[static_cast<std::size_t>(top - 2)] : ladder[m0 != 0.0 ? 0 : 1];
        const double lk = std::log(k_mid) - arg;
        out.w(i) = std::sqrt(a / b) * k_down / k_mid;
        out.inv_w(i) = std::sqrt(b / a) * k_up / k_mid;
        out.loglik += log_c + lk + diff.row(i).dot(sinv_g) - (0.5 * static_cast<double>(d) - kLambda) * std::log(arg);
    }
    return out;
}

}  // namespace

double log_bessel_k(double nu, double x) {
    nu = std::abs(nu);
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    if (x < 500.0) return std::log(std::cyl_bessel_k(nu, x));
    // Hankel asymptotic expansion
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(sum);
}

Eigen::MatrixXd NigParams::covariance() const {
    return scale + skewness * skewness.transpose() / alpha_bar;
}

void NigParams::validate() const {
    const auto d = location.size();
    if (d < 1 || skewness.size() != d || scale.rows() != d || scale.cols() != d)
        throw ShapeError("inconsistent NIG parameter dimensions");
    if (!(alpha_bar > 0.0) || !std::isfinite(alpha_bar)) throw DomainError("NIG alpha_bar must be positive");
    if (!scale.isApprox(scale.transpose(), 1e-12)) throw DomainError("NIG scale matrix not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(scale);
    if (llt.info() != Eigen::Success) throw SingularError("NIG scale matrix not positive definite");
}

ClassicalNig to_classical(const NigParams& p) {
    if (p.dim() != 1) throw ShapeError("classical NIG parameters exist only in one dimension");
    const double s2 = p.scale(0, 0);
    const double beta = p.skewness(0) / s2;
    return {std::sqrt(p.alpha_bar / s2 + beta * beta), beta, std::sqrt(s2 * p.alpha_bar), p.location(0)};
}

NigParams from_classical(const ClassicalNig& c) {
    if (!(c.delta > 0.0) || !(c.alpha > std::abs(c.beta))) throw DomainError("need delta > 0 and alpha > |beta|");
    const double kappa = c.alpha * c.alpha - c.beta * c.beta;
    const double s2 = c.delta / std::sqrt(kappa);  // W' = s2 W rescales E[W'] = delta/sqrt(kappa) to 1
    NigParams p;
    p.alpha_bar = c.delta * std::sqrt(kappa);
    p.location = Eigen::VectorXd::Constant(1, c.mu);
    p.skewness = Eigen::VectorXd::Constant(1, c.beta * s2);
    p.scale = Eigen::MatrixXd::Constant(1, 1, s2);
    return p;
}

double nig_log_density(const NigParams& p, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != p.dim()) throw ShapeError("point dimension does not match NIG dimension");
    Eigen::MatrixXd row = x.transpose();
    return posterior(p, row).loglik;
}

NigFitReport fit_joint_nig(const Eigen::MatrixXd& sample, const NigFitOptions& opts) {
    const auto n = sample.rows();
    const auto d = sample.cols();
    if (d < 1 || n <= 10 * d)
        throw ShapeError("joint NIG fit needs more than 10 observations per dimension (T=" + std::to_string(n) +
                         ", I=" + std::to_string(d) + ")");
    if (!sample.allFinite()) throw DomainError("non-finite value in NIG sample");

    NigFitReport rep;
    NigParams& p = rep.params;
    p.location = sample.colwise().mean().transpose();
    const Eigen::MatrixXd centered = sample.rowwise() - p.location.transpose();
    p.scale = centered.transpose() * centered / static_cast<double>(n);
    p.skewness = Eigen::VectorXd::Zero(d);
    p.alpha_bar = 1.0;
    {
        Eigen::LLT<Eigen::MatrixXd> llt(p.scale);
        if (llt.info() != Eigen::Success) {
            const double tr = p.scale.trace();
            if (!(tr > 0.0)) throw SingularError("sample covariance is zero");
            p.scale += 1e-8 * tr / static_cast<double>(d) * Eigen::MatrixXd::Identity(d, d);
            rep.ridge_repaired = true;
            Eigen::LLT<Eigen::MatrixXd> again(p.scale);
            if (again.info() != Eigen::Success)
                throw SingularError("sample covariance not positive definite after ridge repair");
        }
    }

    if (opts.initial && opts.initial->dim() == d) {
        const NigParams moment_start = p;
        p = *opts.initial;
        if (!std::isfinite(posterior(p, sample).loglik)) p = moment_start;
    }

    const double dn = static_cast<double>(n);
    Posterior post = posterior(p, sample);
    rep.loglik_trace.push_back(post.loglik);
    for (int it = 0; it < opts.max_iterations; ++it) {
        rep.iterations = it + 1;
        NigParams next = p;

        // Location, skewness and scale given the current mixing posterior.
        const double dbar = post.inv_w.mean();
        const double ebar = post.w.mean();
        const Eigen::VectorXd xbar = sample.colwise().mean().transpose();
        const Eigen::VectorXd wx = sample.transpose() * post.inv_w / dn;
        const double denom = dbar * ebar - 1.0;
        if (denom > 1e-14) {
            next.skewness = (dbar * xbar - wx) / denom;
        } else {
            next.skewness.setZero();
        }
        next.location = (wx - next.skewness) / dbar;
        const Eigen::MatrixXd c = sample.rowwise() - next.location.transpose();
        next.scale = c.transpose() * post.inv_w.asDiagonal() * c / dn - ebar * next.skewness * next.skewness.transpose();
        next.scale = 0.5 * (next.scale + next.scale.transpose());
        if (Eigen::LLT<Eigen::MatrixXd>(next.scale).info() != Eigen::Success) break;

        // Mixing law: closed-form inverse Gaussian MLE, then rescale so E[W] = 1.
        const Posterior mid = posterior(next, sample);
        const double d2 = mid.inv_w.mean();
        const double e2 = mid.w.mean();
        if (d2 - 1.0 / e2 > 0.0) {
            const double chi = 1.0 / (d2 - 1.0 / e2);
            next.alpha_bar = std::clamp(chi / e2, opts.min_alpha_bar, opts.max_alpha_bar);
            next.scale *= e2;
            next.skewness *= e2;
        } else {
            next.alpha_bar = opts.max_alpha_bar;
        }

        Posterior trial = posterior(next, sample);
        const double prev_ll = post.loglik;
        if (!std::isfinite(trial.loglik) || trial.loglik < prev_ll - 1e-9 * std::abs(prev_ll)) break;
        p = next;
        post = std::move(trial);
        rep.loglik_trace.push_back(post.loglik);
        if (std::abs(post.loglik - prev_ll) <= opts.rel_tol * std::abs(prev_ll)) {
            rep.converged = true;
            break;
        }
    }
    return rep;
}

NigSampler::NigSampler(const NigParams& p) : params_(p) {
    p.validate();
    chol_ = Eigen::LLT<Eigen::MatrixXd>(p.scale).matrixL();
}

void NigSampler::draw(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> out) const {
    const auto d = params_.dim();
    const double w = sample_inverse_gaussian(rng, 1.0, params_.alpha_bar);
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
    out = params_.location + w * params_.skewness + std::sqrt(w) * (chol_ * z);
}

}  // namespace esgport
