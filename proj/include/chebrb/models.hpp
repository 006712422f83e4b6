#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace chebrb {

/// NGARCH(1,1) under the risk-neutral measure, daily steps:
///   log(S_t / S_{t-1}) = r - sigma2_t / 2 + sqrt(sigma2_t) z_t
///   sigma2_{t+1} = beta0 + beta1 sigma2_t + beta2 sigma2_t (z_t - lambda_theta)^2
struct NgarchParams {
    double r = 0.05 / 365.0;     // per day
    double beta0 = 1e-6;
    double beta1 = 0.8;
    double beta2 = 0.1;
    double lambda_theta = 1.0;   // lambda + theta
    double sigma2_0 = 1e-4;      // variance of the first day's return
    double s0 = 1.0;
    double t_m = 0.0;            // days; a fractional tail is one partial step
};

/// Heston dynamics in annual units.
struct HestonParams {
    double r = 0.05;
    double kappa = 2.0;
    double theta_star = 0.04;
    double sigma_star = 0.3;
    double v0 = 0.04;
    double rho = -0.5;
};

struct McConfig {
    std::size_t paths = 100000;
    std::uint64_t seed = 42;
    bool antithetic = true;
    /// Workers; paths are drawn in fixed blocks with their own seeds, so the
    /// result does not depend on this value. 0 = hardware concurrency.
    std::size_t threads = 1;
};

struct PriceResult {
    double price = 0.0;
    double std_error = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for node `index` of a build run with base seed `seed`.
std::uint64_t node_seed(std::uint64_t seed, std::uint64_t index) noexcept;

void validate(const NgarchParams& p);
void validate(const HestonParams& p);

PriceResult ngarch_price(const NgarchParams& p, double strike, const McConfig& cfg);

PriceResult heston_price(const HestonParams& p, double s0, double strike, double maturity_days,
                         const McConfig& cfg);

/// Black-Scholes style call with aggregate log drift `rate_total` (also the
/// discount exponent) and aggregate log variance `variance_total`.
double lognormal_call(double s0, double strike, double rate_total, double variance_total);

struct Quote {
    double spot = 1.0;
    double strike = 1.0;
    double maturity_days = 0.0;
    double rate_annual = 0.0;
    double price = 0.0;
};

using QuoteSet = std::vector<Quote>;

void validate(const QuoteSet& quotes);

/// Prices a call for (spot, strike, maturity_days, rate_annual).
using QuotePricer = std::function<double(double, double, double, double)>;

/// Every (spot, maturity) pair priced at one strike and rate, spots outer.
QuoteSet make_quote_grid(const QuotePricer& model, std::span<const double> spots,
                         std::span<const double> maturities, double strike, double rate_annual);

/// Evenly stepped values first, first + step, ... up to last inclusive.
std::vector<double> arange_inclusive(double first, double last, double step);

}  // namespace chebrb
