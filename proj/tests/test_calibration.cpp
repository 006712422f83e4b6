#include "chebrb/calibration.hpp"
#include "chebrb/errors.hpp"

#include "support/functions.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chebrb;

namespace {

constexpr double kRate = 0.05;
constexpr double kBeta0 = 1e-6, kBeta2 = 0.1, kLt = 0.5;

// Polynomial over (s0, t_m, sigma2_0, beta1); the other free parameters are
// absent and get pinned by the box.
struct Fixture {
    std::shared_ptr<const Interpolant> poly;
    std::vector<std::string> names{"s0", "t_m", "sigma2_0", "beta1"};
    std::map<std::string, double> fixed;

    Fixture() {
        const Domain d({{0.85, 1.15}, {20, 200}, {5e-5, 2e-4}, {0.6, 0.85}});
        const std::vector<std::size_t> N{6, 6, 3, 3};
        poly = std::make_shared<const Interpolant>(build(
            [](std::span<const double> x) {
                return testfn::ngarch_moment_call(x[0], x[1], kRate, x[2], kBeta0, x[3], kBeta2, kLt);
            },
            d, N));
    }

    std::shared_ptr<PolynomialPricer> pricer() const { return make_pricer(poly, names); }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

FreeParams truth() { return {1.1e-4, kBeta0, 0.75, kBeta2, kLt}; }

QuoteSet quote_shell() {
    QuoteSet q;
    for (double s : arange_inclusive(0.95, 1.1, 0.025))
        for (double t : arange_inclusive(30, 180, 30)) q.push_back({s, 1.0, t, kRate, 0.0});
    return q;
}

QuoteSet priced(const Pricer& p, const FreeParams& params, QuoteSet q) {
    const auto v = p.price(params, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i].price = v[i];
    return q;
}

class Offset : public Pricer {
public:
    Offset(const Pricer& base, double c) : base_(base), c_(c) {}
    std::vector<double> price(const FreeParams& p, const QuoteSet& q) const override {
        auto v = base_.price(p, q);
        for (auto& x : v) x += c_;
        return v;
    }

private:
    const Pricer& base_;
    double c_;
};

class Constant : public Pricer {
public:
    std::vector<double> price(const FreeParams&, const QuoteSet& q) const override {
        return std::vector<double>(q.size(), 0.5);
    }
};

void expect_in_box(const FreeParams& p, const CalibrationBox& b) {
    for (std::size_t k = 0; k < kFreeCount; ++k) {
        EXPECT_GE(p[k], b[k].min) << kFreeNames[k];
        EXPECT_LE(p[k], b[k].max) << kFreeNames[k];
    }
}

}  // namespace

TEST(InMse, SelfConsistency) {
    const auto pr = fixture().pricer();
    const auto q = priced(*pr, truth(), quote_shell());
    EXPECT_EQ(in_mse(truth(), q, *pr), 0.0);
}

TEST(InMse, ConstantOffset) {
    const auto pr = fixture().pricer();
    const auto q = priced(*pr, truth(), quote_shell());
    double top = 0.0;
    for (const auto& x : q) top = std::max(top, x.price);
    // Forming price + c rounds once; that is the only slack allowed.
    for (double c : {1e-3, 0.02}) {
        const double rel = 1e-15 + 4 * std::numeric_limits<double>::epsilon() * top / c;
        EXPECT_NEAR(in_mse(truth(), q, Offset(*pr, c)), c * c, rel * c * c);
    }
}

TEST(InMse, MatchesScalarLoop) {
    const auto& f = fixture();
    const auto pr = f.pricer();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 5; ++trial) {
        const FreeParams p{5e-5 + 1.5e-4 * u(rng), kBeta0, 0.6 + 0.25 * u(rng), kBeta2, kLt};
        QuoteSet q;
        for (int i = 0; i < 25; ++i) {
            const double k = 0.8 + 0.4 * u(rng);
            q.push_back({k * (0.86 + 0.28 * u(rng)), k, 20 + 180 * u(rng), kRate, 0.1 * u(rng)});
        }
        double loop = 0.0;
        for (const auto& x : q) {
            const std::vector<double> pt{x.spot / x.strike, x.maturity_days, p[0], p[2]};
            const double e = x.price - x.strike * oracle::eval_series(f.poly->coeffs(), to_reference(f.poly->domain(), pt));
            loop += e * e;
        }
        loop /= static_cast<double>(q.size());
        EXPECT_NEAR(in_mse(p, q, *pr), loop, 1e-12 * loop);
    }
}

TEST(InMse, DomainErrorsNameCoordinate) {
    const auto pr = fixture().pricer();
    auto p = truth();
    p[2] = 0.95;
    try {
        in_mse(p, quote_shell(), *pr);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("beta1"), std::string::npos);
    }
    QuoteSet far = quote_shell();
    far[0].maturity_days = 400;
    EXPECT_THROW(in_mse(truth(), far, *pr), DomainError);
    EXPECT_THROW(in_mse(truth(), QuoteSet{}, *pr), DomainError);
}

TEST(Pricer, UnknownVariableMustBePinned) {
    const auto& f = fixture();
    std::vector<std::string> names{"s0", "t_m", "sigma2_0", "vol_of_vol"};
    EXPECT_THROW(make_pricer(f.poly, names), DomainError);
    EXPECT_NO_THROW(make_pricer(f.poly, names, {{"vol_of_vol", 0.7}}));
    EXPECT_THROW(make_pricer(f.poly, {"s0", "t_m"}), DimensionError);
}

TEST(Pricer, StrikeHomogeneity) {
    const auto pr = fixture().pricer();
    QuoteSet a{{1.0, 1.0, 90, kRate, 0}}, b{{2.0, 2.0, 90, kRate, 0}};
    EXPECT_NEAR(pr->price(truth(), b)[0], 2 * pr->price(truth(), a)[0], 1e-15);
}

TEST(Pricer, BoxPinsAbsentParameters) {
    const auto box = fixture().pricer()->box(truth());
    EXPECT_EQ(box[0], (Bounds{5e-5, 2e-4}));
    EXPECT_EQ(box[2], (Bounds{0.6, 0.85}));
    EXPECT_EQ(box[1], (Bounds{kBeta0, kBeta0}));
    EXPECT_EQ(box[4], (Bounds{kLt, kLt}));
}

TEST(Calibrate, RoundTrip) {
    const auto pr = fixture().pricer();
    const auto q = priced(*pr, truth(), quote_shell());
    const auto box = pr->box(truth());
    const auto r = calibrate(q, *pr, box);
    EXPECT_LT(r.in_mse, 1e-12);
    EXPECT_TRUE(r.converged);
    expect_in_box(r.params, box);
    const auto s = predict_and_score(r.params, q, *pr);
    EXPECT_LT(s.max_abs_err, 1e-5);
    ASSERT_EQ(r.start_mse.size(), 5u);
    for (double f : r.start_mse) EXPECT_LE(r.in_mse, f);
}

TEST(Calibrate, SingleQuote) {
    const auto pr = fixture().pricer();
    const QuoteSet q{{1.02, 1.0, 75, kRate, 0.035}};
    const auto r = calibrate(q, *pr, pr->box(truth()));
    EXPECT_LT(r.in_mse, 1e-10);
}

TEST(Calibrate, DeterministicAndThreadIndependent) {
    const auto pr = fixture().pricer();
    auto q = priced(*pr, truth(), quote_shell());
    for (std::size_t i = 0; i < q.size(); ++i) q[i].price += 1e-4 * std::sin(3.0 * i);
    CalibrationOptions o;
    o.threads = 1;
    const auto a = calibrate(q, *pr, pr->box(truth()), o);
    o.threads = 4;
    const auto b = calibrate(q, *pr, pr->box(truth()), o);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.in_mse, b.in_mse);
    EXPECT_EQ(a.iterations, b.iterations);
    for (double f : a.start_mse) EXPECT_LE(a.in_mse, f);
    expect_in_box(a.params, pr->box(truth()));
}

TEST(Calibrate, OptimumOnBoundaryStaysInBox) {
    const auto pr = fixture().pricer();
    auto q = priced(*pr, truth(), quote_shell());
    for (auto& x : q) x.price *= 1.5;  // needs more variance than the box allows
    const auto box = pr->box(truth());
    const auto r = calibrate(q, *pr, box);
    expect_in_box(r.params, box);
    EXPECT_NEAR(r.params[0], box[0].max, 1e-6 * box[0].max);
}

TEST(Calibrate, GradientStrategy) {
    const auto pr = fixture().pricer();
    const auto q = priced(*pr, truth(), quote_shell());
    CalibrationOptions o;
    o.strategy = Strategy::gradient_descent;
    const auto r = calibrate(q, *pr, pr->box(truth()), o);
    expect_in_box(r.params, pr->box(truth()));
    for (double f : r.start_mse) EXPECT_LT(r.in_mse, 1e-2 * f);
}

TEST(Calibrate, NoImprovementIsNotConverged) {
    const Constant c;
    CalibrationBox box;
    for (auto& b : box) b = {0.0, 1.0};
    const auto r = calibrate(quote_shell(), c, box);
    EXPECT_FALSE(r.converged);
    EXPECT_NEAR(r.in_mse, 0.25, 1e-15);
}

TEST(Calibrate, GradientNormSmallAtInteriorOptimum) {
    const auto pr = fixture().pricer();
    auto q = priced(*pr, truth(), quote_shell());
    for (std::size_t i = 0; i < q.size(); ++i) q[i].price += 2e-4 * std::cos(1.7 * i);
    const auto r = calibrate(q, *pr, pr->box(truth()));
    const auto base = calibrate(q, *pr, pr->box(truth()));
    EXPECT_EQ(r.gradient_norm, base.gradient_norm);
    EXPECT_LT(r.gradient_norm, 1e-6);
}

TEST(Calibrate, ReducedMatchesFull) {
    const auto& f = fixture();
    TruncationSpec spec;
    spec.epsilon = 1e-14;
    const auto red = make_pricer(std::make_shared<const ReducedPolynomial>(compress(*f.poly, spec)), f.names);
    McConfig mc;
    mc.paths = 4000;
    mc.seed = 11;
    const auto q = priced(McPricer(mc), {1.2e-4, kBeta0, 0.7, kBeta2, kLt}, quote_shell());
    const auto full = f.pricer();
    const auto a = calibrate(q, *full, full->box(truth()));
    const auto b = calibrate(q, *red, red->box(truth()));
    EXPECT_GT(a.in_mse, 0.0);
    EXPECT_LE(b.in_mse, 2 * a.in_mse);
    EXPECT_LE(a.in_mse, 2 * b.in_mse);
}

TEST(McPricerTest, MatchesDirectPricing) {
    McConfig mc;
    mc.paths = 2000;
    const McPricer pr(mc);
    const FreeParams p{1e-4, 1e-6, 0.8, 0.1, 1.0};
    const QuoteSet q{{1.1, 1.1, 30, 0.0365, 0}, {0.9, 1.0, 60, 0.0365, 0}};
    const auto v = pr.price(p, q);
    NgarchParams n;
    n.r = 1e-4;
    n.t_m = 60;
    n.s0 = 0.9;
    EXPECT_DOUBLE_EQ(v[1], ngarch_price(n, 1.0, mc).price);
    n.t_m = 30;
    n.s0 = 1.0;
    EXPECT_NEAR(v[0], 1.1 * ngarch_price(n, 1.0, mc).price, 1e-15);
}

TEST(Predict, Scores) {
    const auto pr = fixture().pricer();
    auto q = priced(*pr, truth(), quote_shell());
    EXPECT_LE(predict_and_score(truth(), q, *pr).max_abs_err, 1e-15);
    q[0].price += 0.01;
    q[1].price -= 0.03;
    const auto s = predict_and_score(truth(), q, *pr);
    EXPECT_NEAR(s.max_abs_err, 0.03, 1e-12);
    EXPECT_NEAR(s.mean_abs_err, 0.04 / q.size(), 1e-12);
    EXPECT_THROW(predict_and_score(truth(), QuoteSet{}, *pr), DomainError);
}

TEST(Minimizers, Halton) {
    EXPECT_EQ(halton(1, 2), (std::vector<double>{0.5, 1.0 / 3}));
    const auto h = halton(2, 3);
    EXPECT_DOUBLE_EQ(h[0], 0.25);
    EXPECT_DOUBLE_EQ(h[1], 2.0 / 3);
    EXPECT_DOUBLE_EQ(h[2], 0.4);
}

TEST(Minimizers, NelderMeadQuadratic) {
    const auto f = [](const std::vector<double>& x) {
        return std::pow(x[0] - 0.3, 2) + 4 * std::pow(x[1] - 0.7, 2) + std::pow(x[2] - 0.5, 2);
    };
    const auto r = nelder_mead(f, {0.9, 0.1, 0.1}, 4000, 1e-15, 1e-10);
    EXPECT_TRUE(r.tolerance_met);
    EXPECT_NEAR(r.x[0], 0.3, 1e-6);
    EXPECT_NEAR(r.x[1], 0.7, 1e-6);
    const auto g = projected_gradient(f, {0.9, 0.1, 0.1}, 4000, 1e-15, 1e-7);
    EXPECT_NEAR(g.x[2], 0.5, 1e-4);
}

TEST(Minimizers, NelderMeadProjects) {
    const auto f = [](const std::vector<double>& x) { return std::pow(x[0] + 1.0, 2) + std::pow(x[1] - 2.0, 2); };
    const auto r = nelder_mead(f, {0.5, 0.5}, 4000, 1e-15, 1e-10);
    EXPECT_NEAR(r.x[0], 0.0, 1e-8);
    EXPECT_NEAR(r.x[1], 1.0, 1e-8);
}
