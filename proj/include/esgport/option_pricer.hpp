#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "esgport/scenario_engine.hpp"

namespace esgport {

/// Minimum-relative-entropy martingale measure over S terminal prices.
struct RiskNeutralWeights {
    Eigen::VectorXd q;
    double kl_divergence = 0.0;
    /// Lagrange multiplier eta of q_s ∝ p_s exp(eta y_s), y_s the discounted
    /// terminal price.
    double tilt = 0.0;
    /// |sum q_s y_s - spot| / spot.
    double martingale_residual = 0.0;
    int iterations = 0;
};

/// Exponential tilt of `p` (uniform when empty) that makes the discounted
/// terminal price a martingale. Discount factor exp(-zeta_f T), T in days and
/// zeta_f per day. Throws InfeasibleMartingale when spot is not strictly
/// inside the hull of discounted prices.
RiskNeutralWeights solve_risk_neutral(std::span<const double> terminal, std::span<const double> p, double zeta_f,
                                      double T, double spot);

struct OptionValues {
    std::vector<double> call;
    std::vector<double> put;
};

/// Discounted q-expectations of (P - K)^+ and (K - P)^+ per strike.
OptionValues value_options(std::span<const double> terminal, const RiskNeutralWeights& q,
                           std::span<const double> strikes, double zeta_f, double T);

enum class OptionKind { Call, Put };

/// Black-Scholes value with annual rate zeta_f c and maturity T / c years.
double bs_price(OptionKind kind, double spot, double strike, double T, double zeta_f, double sigma,
                double c = 255.0);

/// Log of the Black-Scholes value of the out-of-the-money option (the call
/// when strike >= forward, the put otherwise). Finite even where the value
/// itself underflows.
double log_otm_value(double spot, double strike, double T, double zeta_f, double sigma, double c = 255.0);

/// exp(z^2) erfc(z).
double erfcx(double z);

struct ImpliedVol {
    double sigma = 0.0;
    /// Value at (or numerically indistinguishable from) the lower bracket
    /// 1e-6, e.g. an option priced at intrinsic value.
    bool at_lower_bound = false;
};

/// Inverts Black-Scholes on sigma in [1e-6, 5]. The value is first reduced to
/// the out-of-the-money counterpart by put-call parity. Throws OutOfBounds
/// outside the no-arbitrage band and NoConvergence above the bracket.
ImpliedVol implied_vol(double value, double spot, double strike, double T, double zeta_f, OptionKind kind,
                       double c = 255.0);

/// Same inversion, from the log of the out-of-the-money value.
ImpliedVol implied_vol_from_log_otm(double log_value, double spot, double strike, double T, double zeta_f,
                                    double c = 255.0);

struct SurfaceSpec {
    std::vector<int> maturities;   // days, each <= simulated horizon
    std::vector<double> moneyness;  // K / spot
    double zeta_f = 0.0;           // per-day ESG-valued riskless rate
    double c = 255.0;
};

struct OptionCell {
    int T = 0;
    double M = 0.0;
    double strike = 0.0;
    double call = 0.0;
    double put = 0.0;
    /// Implied volatility of the out-of-the-money side; under Black-Scholes
    /// parity the call and put share it.
    double iv = 0.0;
    bool iv_at_bound = false;
    double parity_residual = 0.0;
    std::string error;
};

struct OptionSurface {
    double spot = 1.0;
    double lambda = 0.0;
    double zeta_f = 0.0;
    std::vector<int> maturities;
    std::vector<double> moneyness;
    std::vector<RiskNeutralWeights> measures;  // per maturity; empty q on failure
    std::vector<OptionCell> cells;             // maturity-major
};

/// Solves one measure per maturity (column T-1 of `esg_prices`) and values
/// every strike M * spot. Failures are recorded per cell.
OptionSurface price_surface(const PathMatrix& esg_prices, double spot, const SurfaceSpec& spec, double lambda);

}  // namespace esgport
