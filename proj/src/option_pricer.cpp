#include "esgport/option_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "esgport/error.hpp"

namespace esgport {

namespace {

constexpr double kSigmaLo = 1e-6;
constexpr double kSigmaHi = 5.0;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// log of the undiscounted-then-discounted OTM value and the erfcx
/// difference it is built from (the latter drives the log-vega).
struct OtmParts {
    double log_value;
    double diff;
};

OtmParts otm_parts(double spot, double strike, double T, double zeta_f, double sigma, double c) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(T > 0.0) || !(sigma > 0.0) || !(c > 0.0))
        throw DomainError("Black-Scholes needs positive spot, strike, maturity, volatility and scale");
    const double rt = zeta_f * T;
    const double logF = std::log(spot) + rt;
    const double x = logF - std::log(strike);
    const double v = sigma * std::sqrt(T / c);
    const double d1 = x / v + 0.5 * v;
    const double d2 = d1 - v;
    const double diff = x <= 0.0 ? erfcx(-d1 / std::numbers::sqrt2) - erfcx(-d2 / std::numbers::sqrt2)
                                 : erfcx(d2 / std::numbers::sqrt2) - erfcx(d1 / std::numbers::sqrt2);
    return {logF - std::numbers::ln2 - rt - 0.5 * d1 * d1 + std::log(diff), diff};
}

}  // namespace

double erfcx(double z) {
    if (z < 6.0) {
        if (z < -26.5) return std::numeric_limits<double>::infinity();
        return std::exp(z * z) * std::erfc(z);
    }
    // sqrt(pi) erfcx(z) = 1/(z + (1/2)/(z + (2/2)/(z + (3/2)/(z + ...))))
    double f = z;
    for (int k = 80; k >= 1; --k) f = z + 0.5 * k / f;
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

RiskNeutralWeights solve_risk_neutral(std::span<const double> terminal, std::span<const double> p, double zeta_f,
                                      double T, double spot) {
    const std::size_t n = terminal.size();
    if (n == 0) throw ShapeError("no terminal prices");
    if (!p.empty() && p.size() != n) throw ShapeError("prior probabilities do not match the path count");
    if (!(spot > 0.0) || !std::isfinite(spot)) throw DomainError("spot must be positive");
    const double disc = std::exp(-zeta_f * T);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n)), logp(static_cast<Eigen::Index>(n));
    double psum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!(terminal[s] > 0.0) || !std::isfinite(terminal[s])) throw DomainError("terminal prices must be positive");
        y(static_cast<Eigen::Index>(s)) = terminal[s] * disc;
        const double ps = p.empty() ? 1.0 : p[s];
        if (!(ps > 0.0)) throw DomainError("prior probabilities must be positive");
        psum += ps;
    }
    for (std::size_t s = 0; s < n; ++s)
        logp(static_cast<Eigen::Index>(s)) = std::log((p.empty() ? 1.0 : p[s]) / psum);

    const double lo = y.minCoeff();
    const double hi = y.maxCoeff();
    RiskNeutralWeights out;
    if (hi - lo <= 1e-14 * std::max(spot, hi)) {
        if (std::abs(spot - lo) > 1e-12 * spot) throw InfeasibleMartingale(spot, lo, hi);
        out.q = logp.array().exp();
        out.martingale_residual = std::abs(out.q.dot(y) - spot) / spot;
        return out;
    }
    if (!(spot > lo && spot < hi)) throw InfeasibleMartingale(spot, lo, hi);

    const double scale = hi - lo;
    const Eigen::ArrayXd u = (y.array() - spot) / scale;
    Eigen::ArrayXd w(u.size()), q(u.size());
    double log_norm = 0.0;
    auto eval = [&](double eta, double& g, double& var) {
        w = logp.array() + eta * u;
        const double m = w.maxCoeff();
        q = (w - m).exp();
        const double z = q.sum();
        q /= z;
        log_norm = m + std::log(z);
        g = (q * u).sum();
        var = (q * u * u).sum() - g * g;
    };

    double a = -1.0, b = 1.0, g = 0.0, var = 0.0;
    for (eval(a, g, var); g > 0.0 && a > -1e18; eval(a, g, var)) a *= 2.0;
    for (eval(b, g, var); g < 0.0 && b < 1e18; eval(b, g, var)) b *= 2.0;
    double eta = 0.0;
    int it = 0;
    for (; it < 300; ++it) {
        eval(eta, g, var);
        if (std::abs(g) <= 1e-15) break;
        if (g < 0.0)
            a = eta;
        else
            b = eta;
        if (b - a <= 1e-15 * std::max(1.0, std::abs(eta))) break;
        double next = var > 0.0 ? eta - g / var : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        eta = next;
    }
    eval(eta, g, var);
    out.q = q.matrix();
    out.tilt = eta / scale;
    out.iterations = it;
    out.kl_divergence = (q * (eta * u - log_norm)).sum();
    out.martingale_residual = std::abs(out.q.dot(y) - spot) / spot;
    return out;
}

OptionValues value_options(std::span<const double> terminal, const RiskNeutralWeights& q,
                           std::span<const double> strikes, double zeta_f, double T) {
    if (static_cast<Eigen::Index>(terminal.size()) != q.q.size())
        throw ShapeError("risk-neutral weights do not match the path count");
    const double disc = std::exp(-zeta_f * T);
    OptionValues out;
    out.call.reserve(strikes.size());
    out.put.reserve(strikes.size());
    for (double K : strikes) {
        double c = 0.0, p = 0.0;
        for (std::size_t s = 0; s < terminal.size(); ++s) {
            const double qs = q.q(static_cast<Eigen::Index>(s));
            const double x = terminal[s] - K;
            if (x > 0.0)
                c += qs * x;
            else
                p -= qs * x;
        }
        out.call.push_back(disc * c);
        out.put.push_back(disc * p);
    }
    return out;
}

double bs_price(OptionKind kind, double spot, double strike, double T, double zeta_f, double sigma, double c) {
    const double disc = std::exp(-zeta_f * T);
    const double F = spot / disc;
    const double v = sigma * std::sqrt(T / c);
    if (!(v > 0.0)) {
        return kind == OptionKind::Call ? disc * std::max(F - strike, 0.0) : disc * std::max(strike - F, 0.0);
    }
    const double d1 = std::log(F / strike) / v + 0.5 * v;
    const double d2 = d1 - v;
    if (kind == OptionKind::Call) return disc * (F * norm_cdf(d1) - strike * norm_cdf(d2));
    return disc * (strike * norm_cdf(-d2) - F * norm_cdf(-d1));
}

double log_otm_value(double spot, double strike, double T, double zeta_f, double sigma, double c) {
    return otm_parts(spot, strike, T, zeta_f, sigma, c).log_value;
}

ImpliedVol implied_vol_from_log_otm(double log_value, double spot, double strike, double T, double zeta_f,
                                    double c) {
    if (std::isnan(log_value)) throw OutOfBounds("option value is NaN");
    const double rt = zeta_f * T;
    const bool call_side = std::log(spot) + rt - std::log(strike) <= 0.0;
    const double cap = call_side ? std::log(spot) : std::log(strike) - rt;
    if (log_value >= cap) throw OutOfBounds("option value at or above its no-arbitrage upper bound");

    double lo = kSigmaLo, hi = kSigmaHi;
    if (otm_parts(spot, strike, T, zeta_f, lo, c).log_value >= log_value) return {lo, true};
    if (otm_parts(spot, strike, T, zeta_f, hi, c).log_value < log_value)
        throw NoConvergence("implied volatility above " + std::to_string(kSigmaHi));

    const double tau = T / c;
    double sigma = std::clamp(0.2, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const auto parts = otm_parts(spot, strike, T, zeta_f, sigma, c);
        const double f = parts.log_value - log_value;
        if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(log_value))) return {sigma, false};
        if (f < 0.0)
            lo = sigma;
        else
            hi = sigma;
        if (hi - lo <= 4e-16 * sigma) return {sigma, false};
        const double slope = std::sqrt(2.0 * tau / std::numbers::pi) / parts.diff;
        double next = sigma - f / slope;
        if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
        sigma = next;
    }
    throw NoConvergence("implied volatility iteration limit");
}

ImpliedVol implied_vol(double value, double spot, double strike, double T, double zeta_f, OptionKind kind,
                       double c) {
    if (!std::isfinite(value) || value < 0.0) throw OutOfBounds("option value must be finite and non-negative");
    const double disc = std::exp(-zeta_f * T);
    const double kd = strike * disc;
    const bool call_otm = std::log(spot) + zeta_f * T - std::log(strike) <= 0.0;
    const double tol = 1e-14 * std::max(spot, kd);
    double otm;
    if (kind == OptionKind::Call) {
        if (value >= spot) throw OutOfBounds("call value at or above spot");
        if (value < std::max(spot - kd, 0.0) - tol) throw OutOfBounds("call value below intrinsic value");
        otm = call_otm ? value : value - (spot - kd);
    } else {
        if (value >= kd) throw OutOfBounds("put value at or above the discounted strike");
        if (value < std::max(kd - spot, 0.0) - tol) throw OutOfBounds("put value below intrinsic value");
        otm = call_otm ? value - (kd - spot) : value;
    }
    if (otm <= tol) return {kSigmaLo, true};
    return implied_vol_from_log_otm(std::log(otm), spot, strike, T, zeta_f, c);
}

OptionSurface price_surface(const PathMatrix& esg_prices, double spot, const SurfaceSpec& spec, double lambda) {
    if (spec.maturities.empty() || spec.moneyness.empty()) throw DomainError("empty maturity or moneyness grid");
    OptionSurface out;
    out.spot = spot;
    out.lambda = lambda;
    out.zeta_f = spec.zeta_f;
    out.maturities = spec.maturities;
    out.moneyness = spec.moneyness;
    std::vector<double> strikes;
    for (double M : spec.moneyness) {
        if (!(M > 0.0)) throw DomainError("moneyness must be positive");
        strikes.push_back(M * spot);
    }
    std::vector<double> terminal(static_cast<std::size_t>(esg_prices.rows()));
    for (int T : spec.maturities) {
        std::string err;
        RiskNeutralWeights rn;
        OptionValues vals;
        try {
            if (T < 1 || T > esg_prices.cols())
                throw DomainError("maturity " + std::to_string(T) + " outside the simulated horizon");
            for (Eigen::Index s = 0; s < esg_prices.rows(); ++s) terminal[static_cast<std::size_t>(s)] = esg_prices(s, T - 1);
            rn = solve_risk_neutral(terminal, {}, spec.zeta_f, T, spot);
            vals = value_options(terminal, rn, strikes, spec.zeta_f, T);
        } catch (const Error& e) {
            err = e.kind() + ": " + e.what();
        }
        const double disc = std::exp(-spec.zeta_f * T);
        const double forward = spot / disc;
        for (std::size_t k = 0; k < strikes.size(); ++k) {
            OptionCell cell;
            cell.T = T;
            cell.M = spec.moneyness[k];
            cell.strike = strikes[k];
            if (!err.empty()) {
                cell.error = err;
                cell.call = cell.put = cell.iv = std::numeric_limits<double>::quiet_NaN();
                out.cells.push_back(std::move(cell));
                continue;
            }
            cell.call = vals.call[k];
            cell.put = vals.put[k];
            cell.parity_residual = std::abs(cell.call - cell.put - (spot - cell.strike * disc)) / spot;
            const double otm = cell.strike >= forward ? cell.call : cell.put;
            try {
                if (otm > 0.0) {
                    const auto iv = implied_vol_from_log_otm(std::log(otm), spot, cell.strike, T, spec.zeta_f, spec.c);
                    cell.iv = iv.sigma;
                    cell.iv_at_bound = iv.at_lower_bound;
                } else {
                    cell.iv = kSigmaLo;
                    cell.iv_at_bound = true;
                }
            } catch (const Error& e) {
                cell.iv = std::numeric_limits<double>::quiet_NaN();
                cell.error = e.kind() + ": " + e.what();
            }
            out.cells.push_back(std::move(cell));
        }
        out.measures.push_back(std::move(rn));
    }
    return out;
}

}  // namespace esgport
