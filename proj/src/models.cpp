#include "chebrb/models.hpp"

#include "chebrb/errors.hpp"
#include "chebrb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace chebrb {

namespace {

constexpr std::size_t kBlockSamples = 2048;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

void check_config(const McConfig& cfg) {
    require(cfg.paths >= 1, "paths must be >= 1");
    require(!cfg.antithetic || cfg.paths >= 2, "antithetic sampling needs paths >= 2");
}

// Draws `samples` independent payoff samples (pair means when antithetic) in
// fixed-size blocks, each block seeded from (seed, block index), and returns
// the discounted mean and its standard error.
template <class Sample>
PriceResult monte_carlo(const McConfig& cfg, double discount, Sample sample) {
    check_config(cfg);
    const std::size_t count = cfg.antithetic ? cfg.paths / 2 : cfg.paths;
    const std::size_t blocks = (count + kBlockSamples - 1) / kBlockSamples;
    std::vector<double> values(count);
    parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        std::mt19937_64 rng(node_seed(cfg.seed, b));
        std::normal_distribution<double> normal;
        const std::size_t lo = b * kBlockSamples;
        const std::size_t hi = std::min(count, lo + kBlockSamples);
        for (std::size_t i = lo; i < hi; ++i) values[i] = sample(rng, normal);
    });
    const double n = static_cast<double>(count);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = count > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {discount * mean, discount * se};
}

void check_finite(double log_s, double var, std::size_t step, const char* model) {
    if (!std::isfinite(log_s) || !std::isfinite(var)) {
        throw OracleError(std::string(model) + " path became non-finite at step " +
                          std::to_string(step));
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t node_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index));
}

void validate(const NgarchParams& p) {
    require(std::isfinite(p.r), "ngarch: r must be finite");
    require(p.beta0 >= 0.0, "ngarch: beta0 must be >= 0");
    require(p.beta1 >= 0.0, "ngarch: beta1 must be >= 0");
    require(p.beta2 >= 0.0, "ngarch: beta2 must be >= 0");
    require(std::isfinite(p.lambda_theta), "ngarch: lambda_theta must be finite");
    require(p.sigma2_0 > 0.0 && std::isfinite(p.sigma2_0), "ngarch: sigma2_0 must be > 0");
    require(p.s0 > 0.0 && std::isfinite(p.s0), "ngarch: s0 must be > 0");
    require(p.t_m >= 0.0 && std::isfinite(p.t_m), "ngarch: t_m must be >= 0");
}

void validate(const HestonParams& p) {
    require(std::isfinite(p.r), "heston: r must be finite");
    require(p.kappa >= 0.0, "heston: kappa must be >= 0");
    require(p.theta_star >= 0.0, "heston: theta must be >= 0");
    require(p.sigma_star >= 0.0, "heston: sigma must be >= 0");
    require(p.v0 >= 0.0, "heston: v0 must be >= 0");
    require(p.rho >= -1.0 && p.rho <= 1.0, "heston: rho must lie in [-1, 1]");
}

PriceResult ngarch_price(const NgarchParams& p, double strike, const McConfig& cfg) {
    validate(p);
    require(strike > 0.0, "strike must be > 0");
    const auto days = static_cast<std::size_t>(std::floor(p.t_m));
    const double frac = p.t_m - static_cast<double>(days);

    auto path = [&](double sign, const std::vector<double>& z) {
        double log_s = 0.0;
        double var = p.sigma2_0;
        for (std::size_t t = 0; t < days; ++t) {
            const double e = sign * z[t];
            log_s += p.r - 0.5 * var + std::sqrt(var) * e;
            const double shock = e - p.lambda_theta;
            var = p.beta0 + p.beta1 * var + p.beta2 * var * shock * shock;
            check_finite(log_s, var, t + 1, "ngarch");
        }
        if (frac > 0.0) {
            log_s += (p.r - 0.5 * var) * frac + std::sqrt(var * frac) * sign * z[days];
            check_finite(log_s, var, days + 1, "ngarch");
        }
        return std::max(p.s0 * std::exp(log_s) - strike, 0.0);
    };

    const std::size_t steps = days + (frac > 0.0 ? 1 : 0);
    if (steps == 0) {
        check_config(cfg);
        return {std::max(p.s0 - strike, 0.0), 0.0};
    }
    return monte_carlo(cfg, std::exp(-p.r * p.t_m), [&](auto& rng, auto& normal) {
        thread_local std::vector<double> z;
        z.resize(steps);
        for (auto& v : z) v = normal(rng);
        if (!cfg.antithetic) return path(1.0, z);
        return 0.5 * (path(1.0, z) + path(-1.0, z));
    });
}

PriceResult heston_price(const HestonParams& p, double s0, double strike, double maturity_days,
                         const McConfig& cfg) {
    validate(p);
    require(s0 > 0.0, "s0 must be > 0");
    require(strike > 0.0, "strike must be > 0");
    require(maturity_days >= 0.0 && std::isfinite(maturity_days), "maturity must be >= 0");
    const auto days = static_cast<std::size_t>(std::floor(maturity_days));
    const double frac = maturity_days - static_cast<double>(days);
    const std::size_t steps = days + (frac > 0.0 ? 1 : 0);
    if (steps == 0) {
        check_config(cfg);
        return {std::max(s0 - strike, 0.0), 0.0};
    }
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));

    auto path = [&](double sign, const std::vector<double>& z) {
        double log_s = 0.0;
        double v = p.v0;
        for (std::size_t t = 0; t < steps; ++t) {
            const double dt = (t < days ? 1.0 : frac) / 365.0;
            const double z1 = sign * z[2 * t];
            const double z2 = p.rho * z1 + rho_c * sign * z[2 * t + 1];
            const double vp = std::max(v, 0.0);
            const double sq = std::sqrt(vp * dt);
            log_s += (p.r - 0.5 * vp) * dt + sq * z1;
            v += p.kappa * (p.theta_star - vp) * dt + p.sigma_star * sq * z2;
            check_finite(log_s, v, t + 1, "heston");
        }
        return std::max(s0 * std::exp(log_s) - strike, 0.0);
    };

    const double discount = std::exp(-p.r * maturity_days / 365.0);
    return monte_carlo(cfg, discount, [&](auto& rng, auto& normal) {
        thread_local std::vector<double> z;
        z.resize(2 * steps);
        for (auto& v : z) v = normal(rng);
        if (!cfg.antithetic) return path(1.0, z);
        return 0.5 * (path(1.0, z) + path(-1.0, z));
    });
}

double lognormal_call(double s0, double strike, double rate_total, double variance_total) {
    if (variance_total < 0.0) throw DomainError("lognormal_call: variance must be >= 0");
    require(s0 > 0.0 && strike > 0.0, "lognormal_call: spot and strike must be > 0");
    const double df = std::exp(-rate_total);
    if (variance_total == 0.0) return std::max(s0 - strike * df, 0.0);
    const double sd = std::sqrt(variance_total);
    const double d1 = (std::log(s0 / strike) + rate_total + 0.5 * variance_total) / sd;
    return s0 * norm_cdf(d1) - strike * df * norm_cdf(d1 - sd);
}

void validate(const QuoteSet& quotes) {
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& q = quotes[i];
        if (!(q.spot > 0.0) || !(q.strike > 0.0) || !(q.maturity_days >= 0.0) ||
            !(q.price >= 0.0) || !std::isfinite(q.rate_annual)) {
            throw DomainError("invalid quote at index " + std::to_string(i));
        }
    }
}

QuoteSet make_quote_grid(const QuotePricer& model, std::span<const double> spots,
                         std::span<const double> maturities, double strike, double rate_annual) {
    if (spots.empty() || maturities.empty()) throw DomainError("quote grid needs spots and maturities");
    QuoteSet out;
    out.reserve(spots.size() * maturities.size());
    for (double s : spots) {
        for (double t : maturities) {
            out.push_back({s, strike, t, rate_annual, model(s, strike, t, rate_annual)});
        }
    }
    return out;
}

std::vector<double> arange_inclusive(double first, double last, double step) {
    if (!(step > 0.0) || last < first) throw DomainError("arange_inclusive: bad range");
    const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = first + static_cast<double>(i) * step;
    return v;
}

}  // namespace chebrb
