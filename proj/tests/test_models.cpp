#include "chebrb/errors.hpp"
#include "chebrb/models.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace chebrb;

namespace {

// Frozen once from oracle::ngarch_call_loop(1, 1, 0.05/365, 1e-4, 1e-6, 0.8,
// 0.1, 1.0, 100, 100000, 42).
constexpr double kNgarchRegression = 0.046616444468677916;
// Frozen once from oracle::lognormal_call_quadrature(1, 1, 0, 0.04).
constexpr double kLognormalAtm = 0.079655674554052647;

NgarchParams base_ngarch() {
    NgarchParams p;
    p.r = 0.05 / 365.0;
    p.beta0 = 1e-6;
    p.beta1 = 0.8;
    p.beta2 = 0.1;
    p.lambda_theta = 1.0;
    p.sigma2_0 = 1e-4;
    p.s0 = 1.0;
    p.t_m = 60;
    return p;
}

McConfig mc(std::size_t paths, std::uint64_t seed = 42) {
    McConfig c;
    c.paths = paths;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Ngarch, ZeroMaturityIsIntrinsic) {
    auto p = base_ngarch();
    p.t_m = 0;
    p.s0 = 1.1;
    auto r = ngarch_price(p, 1.0, mc(1000));
    EXPECT_NEAR(r.price, 0.1, 1e-15);
    EXPECT_EQ(r.std_error, 0.0);
    p.s0 = 0.9;
    EXPECT_EQ(ngarch_price(p, 1.0, mc(1000)).price, 0.0);
}

TEST(Ngarch, FrozenVarianceMatchesLognormal) {
    auto p = base_ngarch();
    p.beta0 = 0.0;
    p.beta1 = 1.0;
    p.beta2 = 0.0;
    p.t_m = 90;
    McConfig c = mc(200000);
    c.threads = 0;
    const auto r = ngarch_price(p, 1.0, c);
    const double exact = lognormal_call(p.s0, 1.0, p.r * p.t_m, p.sigma2_0 * p.t_m);
    EXPECT_LT(std::abs(r.price - exact), 3 * r.std_error);
}

TEST(Ngarch, RegressionValue) {
    const double loop = oracle::ngarch_call_loop(1, 1, 0.05 / 365, 1e-4, 2e-6 * 0.5, 0.8, 0.1, 1.0, 100, 100000, 42);
    EXPECT_NEAR(loop, kNgarchRegression, 1e-14);
    auto p = base_ngarch();
    p.t_m = 100;
    EXPECT_NEAR(ngarch_price(p, 1.0, mc(100000)).price, kNgarchRegression, 1e-12);
}

TEST(Ngarch, Homogeneity) {
    auto p = base_ngarch();
    p.s0 = 1.05;
    const auto base = ngarch_price(p, 1.0, mc(20000, 7));
    for (double c : {1.0, 2.0, 0.5}) {
        auto q = p;
        q.s0 = c * p.s0;
        const auto r = ngarch_price(q, c, mc(20000, 7));
        EXPECT_NEAR(r.price, c * base.price, 1e-12 * c * base.price) << "c = " << c;
    }
}

TEST(Ngarch, MonotoneLadders) {
    auto p = base_ngarch();
    double prev = -1.0;
    for (double s : {0.9, 0.95, 1.0, 1.05, 1.1}) {
        p.s0 = s;
        const double v = ngarch_price(p, 1.0, mc(20000)).price;
        EXPECT_GE(v, prev);
        prev = v;
    }
    p.s0 = 1.0;
    prev = std::numeric_limits<double>::infinity();
    for (double k : {0.9, 0.95, 1.0, 1.05, 1.1}) {
        const double v = ngarch_price(p, k, mc(20000)).price;
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Ngarch, DeterministicAndThreadIndependent) {
    const auto p = base_ngarch();
    McConfig a = mc(30000);
    const auto r1 = ngarch_price(p, 1.0, a);
    const auto r2 = ngarch_price(p, 1.0, a);
    a.threads = 4;
    const auto r3 = ngarch_price(p, 1.0, a);
    EXPECT_EQ(r1.price, r2.price);
    EXPECT_EQ(r1.price, r3.price);
    EXPECT_EQ(r1.std_error, r3.std_error);
    EXPECT_NE(r1.price, ngarch_price(p, 1.0, mc(30000, 43)).price);
}

TEST(Ngarch, StandardErrorScaling) {
    const auto p = base_ngarch();
    const double a = ngarch_price(p, 1.0, mc(50000)).std_error;
    const double b = ngarch_price(p, 1.0, mc(200000)).std_error;
    EXPECT_NEAR(a / b, 2.0, 0.4);
}

TEST(Ngarch, PlainSamplingAgreesWithAntithetic) {
    const auto p = base_ngarch();
    McConfig c = mc(100000);
    const auto anti = ngarch_price(p, 1.0, c);
    c.antithetic = false;
    const auto plain = ngarch_price(p, 1.0, c);
    EXPECT_LT(std::abs(anti.price - plain.price), 3 * std::hypot(anti.std_error, plain.std_error));
}

TEST(Ngarch, FractionalMaturityInterpolatesWithFrozenVariance) {
    auto p = base_ngarch();
    p.beta0 = 0.0;
    p.beta1 = 1.0;
    p.beta2 = 0.0;
    p.t_m = 45.5;
    const auto r = ngarch_price(p, 1.0, mc(200000));
    EXPECT_LT(std::abs(r.price - lognormal_call(1.0, 1.0, p.r * p.t_m, p.sigma2_0 * p.t_m)), 3 * r.std_error);
}

TEST(Ngarch, Errors) {
    auto p = base_ngarch();
    EXPECT_THROW(ngarch_price(p, 0.0, mc(100)), DomainError);
    p.sigma2_0 = 0.0;
    EXPECT_THROW(ngarch_price(p, 1.0, mc(100)), DomainError);
    p = base_ngarch();
    p.beta1 = -0.1;
    EXPECT_THROW(ngarch_price(p, 1.0, mc(100)), DomainError);
    p = base_ngarch();
    EXPECT_THROW(ngarch_price(p, 1.0, mc(1)), DomainError);
    p.beta1 = 1e300;
    try {
        ngarch_price(p, 1.0, mc(100));
        FAIL() << "expected OracleError";
    } catch (const OracleError& e) {
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
    }
}

TEST(Heston, ZeroVolOfVolMatchesIntegratedVariance) {
    HestonParams h;
    h.kappa = 2.0;
    h.theta_star = 0.04;
    h.v0 = 0.09;
    h.sigma_star = 0.0;
    const double days = 180, T = days / 365.0;
    const auto r = heston_price(h, 1.0, 1.0, days, mc(200000));
    const double integrated = h.theta_star * T + (h.v0 - h.theta_star) * (1 - std::exp(-h.kappa * T)) / h.kappa;
    const double exact = lognormal_call(1.0, 1.0, h.r * T, integrated);
    EXPECT_LT(std::abs(r.price - exact), 3 * r.std_error);
}

TEST(Heston, CorrelationIrrelevantWithoutVolOfVol) {
    HestonParams h;
    h.sigma_star = 0.0;
    h.rho = -0.7;
    const auto a = heston_price(h, 1.0, 1.0, 90, mc(20000));
    h.rho = 0.3;
    const auto b = heston_price(h, 1.0, 1.0, 90, mc(20000));
    EXPECT_EQ(a.price, b.price);
}

TEST(Heston, ZeroMaturityAndDeterminism) {
    HestonParams h;
    EXPECT_NEAR(heston_price(h, 1.2, 1.0, 0, mc(100)).price, 0.2, 1e-15);
    EXPECT_EQ(heston_price(h, 0.8, 1.0, 0, mc(100)).price, 0.0);
    EXPECT_EQ(heston_price(h, 1.2, 1.0, 0, mc(100)).std_error, 0.0);
    McConfig c = mc(20000);
    const double a = heston_price(h, 1.0, 1.0, 120, c).price;
    c.threads = 3;
    EXPECT_EQ(a, heston_price(h, 1.0, 1.0, 120, c).price);
    h.rho = 1.5;
    EXPECT_THROW(heston_price(h, 1.0, 1.0, 10, c), DomainError);
}

TEST(Lognormal, Degenerate) {
    EXPECT_DOUBLE_EQ(lognormal_call(1.2, 1.0, 0.0, 0.0), 0.2);
    EXPECT_EQ(lognormal_call(0.8, 1.0, 0.0, 0.0), 0.0);
    EXPECT_THROW(lognormal_call(1.0, 1.0, 0.0, -1e-9), DomainError);
}

TEST(Lognormal, QuadratureRegression) {
    EXPECT_NEAR(oracle::lognormal_call_quadrature(1, 1, 0, 0.04), kLognormalAtm, 1e-13);
    EXPECT_NEAR(lognormal_call(1, 1, 0, 0.04), kLognormalAtm, 1e-12);
    for (double s : {0.8, 1.0, 1.3})
        for (double v : {0.01, 0.1})
            EXPECT_NEAR(lognormal_call(s, 1.0, 0.02, v), oracle::lognormal_call_quadrature(s, 1.0, 0.02, v), 1e-11);
}

TEST(Lognormal, DeepInTheMoney) {
    EXPECT_NEAR(lognormal_call(10.0, 1.0, 0.03, 0.04), 10.0 - std::exp(-0.03), 1e-10);
}

TEST(Lognormal, ParityBounds) {
    for (double s : {0.5, 0.9, 1.0, 1.1, 2.0}) {
        for (double rate : {0.0, 0.05}) {
            for (double v : {1e-4, 0.04, 0.5}) {
                const double c = lognormal_call(s, 1.0, rate, v);
                const double fwd = s - std::exp(-rate);
                EXPECT_GE(c - fwd, -1e-15);
                EXPECT_LE(c - fwd, std::exp(-rate) + 1e-15);
            }
        }
    }
}

TEST(QuoteGrid, Shapes) {
    const QuotePricer flat = [](double s, double k, double t, double r) {
        return lognormal_call(s, k, r * t / 365.0, 0.0);
    };
    EXPECT_EQ(make_quote_grid(flat, std::vector<double>{1.0}, std::vector<double>{30}, 1.0, 0.05).size(), 1u);
    const auto spots = arange_inclusive(0.8, 1.18, 0.02);
    const auto mats = arange_inclusive(10, 340, 30);
    EXPECT_EQ(spots.size(), 20u);
    EXPECT_EQ(mats.size(), 12u);
    const auto q = make_quote_grid(flat, spots, mats, 1.0, 0.05);
    ASSERT_EQ(q.size(), 240u);
    EXPECT_DOUBLE_EQ(q[13].spot, spots[1]);
    EXPECT_DOUBLE_EQ(q[13].maturity_days, mats[1]);
    for (const auto& x : q)
        EXPECT_DOUBLE_EQ(x.price, std::max(x.spot - std::exp(-0.05 * x.maturity_days / 365.0), 0.0));
    EXPECT_THROW(make_quote_grid(flat, std::vector<double>{}, mats, 1.0, 0.05), DomainError);
}

TEST(QuoteGrid, OracleErrorsPropagate) {
    const QuotePricer bad = [](double, double, double, double) -> double { throw OracleError("boom"); };
    EXPECT_THROW(make_quote_grid(bad, std::vector<double>{1.0}, std::vector<double>{1.0}, 1.0, 0.0), OracleError);
}

TEST(Seeds, NodeSeedsDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(node_seed(42, i));
    EXPECT_EQ(seen.size(), 10000u);
    EXPECT_NE(node_seed(42, 0), node_seed(43, 0));
}
