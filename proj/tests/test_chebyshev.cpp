#include "chebrb/chebyshev.hpp"
#include "chebrb/errors.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace chebrb;
using std::numbers::pi;

namespace {

std::vector<double> values_on_nodes(std::size_t N, double (*f)(double)) {
    std::vector<double> v;
    for (double x : reference_nodes(N)) v.push_back(f(x));
    return v;
}

}  // namespace

TEST(ChebPolyValues, SmallCases) {
    const std::vector<double> half{0.5};
    const auto T = cheb_poly_values(3, half);
    EXPECT_DOUBLE_EQ(T[0], 1.0);
    EXPECT_DOUBLE_EQ(T[1], 0.5);
    EXPECT_DOUBLE_EQ(T[2], -0.5);
    EXPECT_DOUBLE_EQ(T[3], -1.0);
    const std::vector<double> one{1.0};
    const auto U = cheb_poly_values(5, one);
    for (std::size_t l = 0; l <= 5; ++l) EXPECT_DOUBLE_EQ(U[l], 1.0);
}

TEST(ChebPolyValues, MatchesTrigDefinition) {
    std::vector<double> x;
    for (int i = 0; i < 100; ++i) x.push_back(-1.0 + 2.0 * i / 99.0);
    const auto T = cheb_poly_values(8, x);
    for (std::size_t l = 0; l <= 8; ++l)
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(T[l * x.size() + k], oracle::cheb_T(l, x[k]), 1e-12);
}

TEST(ChebPolyValues, OutOfRangeThrows) {
    const std::vector<double> bad{1.0 + 1e-9};
    EXPECT_THROW(cheb_poly_values(2, bad), DomainError);
    const std::vector<double> edge{1.0 + 1e-13};
    EXPECT_NO_THROW(cheb_poly_values(2, edge));
}

TEST(Nodes, ReferenceAndMapped) {
    const auto g = nodes(2, -1.0, 1.0);
    ASSERT_EQ(g.count(), 3u);
    EXPECT_DOUBLE_EQ(g.nodes[0], 1.0);
    EXPECT_NEAR(g.nodes[1], 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(g.nodes[2], -1.0);
    const auto m = nodes(2, 0.0, 365.0);
    EXPECT_DOUBLE_EQ(m.nodes[0], 365.0);
    EXPECT_NEAR(m.nodes[1], 182.5, 1e-12);
    EXPECT_DOUBLE_EQ(m.nodes[2], 0.0);
}

TEST(Nodes, SymmetricWithExactEndpoints) {
    const auto g = nodes(12, 0.60, 0.95);
    ASSERT_EQ(g.count(), 13u);
    EXPECT_EQ(g.nodes.front(), 0.95);
    EXPECT_EQ(g.nodes.back(), 0.60);
    for (std::size_t k = 0; k <= 12; ++k) {
        EXPECT_NEAR(g.nodes[k] + g.nodes[12 - k], 2 * 0.775, 1e-15);
        EXPECT_NEAR(g.nodes[k], 0.5 * (std::cos(pi * k / 12.0) * 0.35 + 1.55), 1e-15);
    }
}

TEST(Nodes, InvalidArguments) {
    EXPECT_THROW(nodes(0, 0.0, 1.0), DomainError);
    EXPECT_THROW(nodes(3, 1.0, 1.0), DomainError);
    EXPECT_THROW(nodes(3, 2.0, 1.0), DomainError);
}

TEST(Coeffs1d, SquareIsHalfT0PlusHalfT2) {
    const std::vector<double> v{1.0, 0.0, 1.0};
    const auto s = coeffs_1d(v);
    ASSERT_EQ(s.coeffs.size(), 3u);
    EXPECT_NEAR(s.coeffs[0], 0.5, 1e-14);
    EXPECT_NEAR(s.coeffs[1], 0.0, 1e-14);
    EXPECT_NEAR(s.coeffs[2], 0.5, 1e-14);
}

TEST(Coeffs1d, BasisElementRecovered) {
    std::vector<double> v;
    for (double x : reference_nodes(8)) v.push_back(oracle::cheb_T(4, x));
    const auto s = coeffs_1d(v);
    for (std::size_t l = 0; l <= 8; ++l) EXPECT_NEAR(s.coeffs[l], l == 4 ? 1.0 : 0.0, 1e-14);
}

TEST(Coeffs1d, MatchesCosineProjection) {
    const auto v = values_on_nodes(10, [](double x) { return std::exp(x); });
    const auto s = coeffs_1d(v);
    const auto ref = oracle::dct_coeffs(v);
    for (std::size_t l = 0; l <= 10; ++l) EXPECT_NEAR(s.coeffs[l], ref[l], 1e-12);
}

// The last coefficient comes from y_N of the extended transform; the
// alternative reading (y_{N+1}) fails this check.
TEST(Coeffs1d, LastCoefficientUsesMiddleOfExtension) {
    std::mt19937_64 rng(9);
    for (std::size_t N = 1; N <= 12; ++N) {
        const auto c = oracle::random_array(rng, {N + 1});
        std::vector<double> v;
        for (double x : reference_nodes(N)) v.push_back(oracle::eval_series_1d(c.data(), x));
        const auto s = coeffs_1d(v);
        for (std::size_t l = 0; l <= N; ++l) EXPECT_NEAR(s.coeffs[l], c[l], 1e-12) << "N=" << N;
    }
}

TEST(Coeffs1d, ReproducesNodeValuesUpTo64) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t N : {1, 2, 3, 5, 7, 16, 31, 64}) {
        std::vector<double> v(N + 1);
        for (auto& x : v) x = u(rng);
        const auto s = coeffs_1d(v);
        const auto x = reference_nodes(N);
        double scale = 0.0;
        for (double y : v) scale = std::max(scale, std::abs(y));
        for (std::size_t k = 0; k <= N; ++k) EXPECT_NEAR(s(x[k]), v[k], 1e-12 * scale);
    }
}

TEST(Coeffs1d, TooFewValuesThrows) {
    const std::vector<double> one{1.0};
    EXPECT_THROW(coeffs_1d(one), DomainError);
}

TEST(CoeffsNd, ProductOfLinears) {
    const NdArray v({2, 2}, {1.0, -1.0, -1.0, 1.0});  // x*y at (1,1),(1,-1),(-1,1),(-1,-1)
    const auto c = coeffs_nd(v);
    EXPECT_NEAR(c.at({1, 1}), 1.0, 1e-14);
    EXPECT_NEAR(c.at({0, 0}), 0.0, 1e-14);
    EXPECT_NEAR(c.at({0, 1}), 0.0, 1e-14);
    EXPECT_NEAR(c.at({1, 0}), 0.0, 1e-14);
}

TEST(CoeffsNd, SumOfSquares) {
    NdArray v({3, 3});
    const auto x = reference_nodes(2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) v.at({i, j}) = x[i] * x[i] + x[j] * x[j];
    const auto c = coeffs_nd(v);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double expect = 0.0;
            if (i == 0 && j == 0) expect = 1.0;
            if ((i == 2 && j == 0) || (i == 0 && j == 2)) expect = 0.5;
            EXPECT_NEAR(c.at({i, j}), expect, 1e-14);
        }
    }
}

TEST(CoeffsNd, GenerateThenRecover) {
    std::mt19937_64 rng(13);
    const auto c = oracle::random_array(rng, {4, 3, 5});
    const auto r = coeffs_nd(oracle::node_values(c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(r[i], c[i], 1e-12);
}

TEST(CoeffsNd, AxisRotationCommutes) {
    std::mt19937_64 rng(14);
    const auto v = oracle::random_array(rng, {3, 4, 5});
    const auto c = coeffs_nd(v);
    const auto c_rot = coeffs_nd(permute_cycle(v));
    const auto expect = permute_cycle(c);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c_rot[i], expect[i], 1e-12);
}

TEST(CoeffsNd, SingletonExtentThrows) { EXPECT_THROW(coeffs_nd(NdArray({3, 1})), DomainError); }

TEST(Derivative, Linear) {
    const auto q = derivative_coeffs({{0.0, 1.0}});
    ASSERT_EQ(q.coeffs.size(), 1u);
    EXPECT_DOUBLE_EQ(q.coeffs[0], 1.0);
}

TEST(Derivative, Square) {
    const auto q = derivative_coeffs({{0.5, 0.0, 0.5}});
    ASSERT_EQ(q.coeffs.size(), 2u);
    EXPECT_NEAR(q.coeffs[0], 0.0, 1e-15);
    EXPECT_NEAR(q.coeffs[1], 2.0, 1e-15);
}

TEST(Derivative, ExpMatchesCentredDifferences) {
    const auto s = coeffs_1d(values_on_nodes(12, [](double x) { return std::exp(x); }));
    const auto d = derivative_coeffs(s);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const double x = -0.99 + 1.98 * i / 49.0;
        EXPECT_NEAR(d(x), (s(x + h) - s(x - h)) / (2 * h), 1e-5);
    }
}

TEST(Derivative, ConstantGivesZeroAndShortThrows) {
    const auto q = derivative_coeffs({{3.0, 0.0, 0.0, 0.0}});
    for (double c : q.coeffs) EXPECT_EQ(c, 0.0);
    EXPECT_THROW(derivative_coeffs({{1.0}}), DomainError);
}

TEST(WeightedDot, Normalisation) {
    EXPECT_NEAR(weighted_dot(ChebSeries1D{{1.0}}, ChebSeries1D{{1.0}}), pi, 1e-14);
    EXPECT_NEAR(weighted_dot(ChebSeries1D{{0.0, 1.0}}, ChebSeries1D{{0.0, 1.0}}), pi / 2, 1e-14);
    for (std::size_t k = 1; k < 8; ++k) {
        ChebSeries1D t{std::vector<double>(8, 0.0)};
        t.coeffs[k] = 1.0;
        EXPECT_NEAR(weighted_dot(t, t), pi / 2, 1e-14);
    }
}

TEST(WeightedDot, BivariateMatchesTensorQuadrature) {
    std::mt19937_64 rng(15);
    const auto a = oracle::random_array(rng, {4, 5});
    const auto b = oracle::random_array(rng, {4, 5});
    // a*b has degree (6, 8); N = (7, 9) Lobatto points integrate it exactly.
    const std::size_t N1 = 7, N2 = 9;
    double q = 0.0;
    for (std::size_t i = 0; i <= N1; ++i) {
        for (std::size_t j = 0; j <= N2; ++j) {
            const double x[2] = {oracle::lobatto(i, N1), oracle::lobatto(j, N2)};
            const double w = (pi / N1) * (i == 0 || i == N1 ? 0.5 : 1.0) * (pi / N2) *
                             (j == 0 || j == N2 ? 0.5 : 1.0);
            q += w * oracle::eval_series(a, x) * oracle::eval_series(b, x);
        }
    }
    EXPECT_NEAR(weighted_dot(a, b), q, 1e-12);
}

TEST(WeightedDot, PositiveDefiniteAndShapeChecked) {
    std::mt19937_64 rng(16);
    const auto a = oracle::random_array(rng, {3, 3});
    EXPECT_GT(weighted_dot(a, a), 0.0);
    EXPECT_EQ(weighted_dot(NdArray({3, 3}), NdArray({3, 3})), 0.0);
    EXPECT_THROW(weighted_dot(NdArray({3, 3}), NdArray({3, 2})), DimensionError);
}

TEST(GlcQuadrature, ConstantAndOrthogonality) {
    for (std::size_t N : {1, 2, 5, 9}) EXPECT_NEAR(glc_quadrature(std::vector<double>(N + 1, 1.0)), pi, 1e-14);
    std::vector<double> t2;
    for (double x : reference_nodes(4)) t2.push_back(2 * x * x - 1);
    EXPECT_NEAR(glc_quadrature(t2), 0.0, 1e-14);
    EXPECT_THROW(glc_quadrature(std::vector<double>{1.0}), DomainError);
}

// The (N+1)-point rule integrates x^p exactly up to p = 2N - 1, not beyond.
TEST(GlcQuadrature, ExactnessDegreeIs2NMinus1) {
    auto moment = [](std::size_t p) {  // integral of x^p / sqrt(1 - x^2)
        if (p % 2) return 0.0;
        double m = pi;
        for (std::size_t k = 1; k <= p / 2; ++k) m *= (2.0 * k - 1) / (2.0 * k);
        return m;
    };
    for (std::size_t N = 2; N <= 8; ++N) {
        for (std::size_t p = 0; p <= 2 * N + 2; ++p) {
            std::vector<double> v;
            for (double x : reference_nodes(N)) v.push_back(std::pow(x, static_cast<double>(p)));
            const double err = std::abs(glc_quadrature(v) - moment(p));
            if (p <= 2 * N - 1) EXPECT_LT(err, 1e-13) << "N=" << N << " p=" << p;
            if (p == 2 * N) EXPECT_GT(err, 1e-6) << "N=" << N;
        }
    }
    std::vector<double> x6;
    for (double x : reference_nodes(4)) x6.push_back(std::pow(x, 6));
    EXPECT_NEAR(glc_quadrature(x6), 5 * pi / 16, 1e-14);
}

TEST(WeightedDot, AgreesWithQuadratureOnRandomPairs) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t na = 1 + rng() % 8, nb = 1 + rng() % 8;
        const std::size_t n = std::max(na, nb);
        ChebSeries1D a{oracle::random_array(rng, {n}).values()};
        ChebSeries1D b{oracle::random_array(rng, {n}).values()};
        const std::size_t N = n;  // exact for degree 2(n-1) <= 2N - 1
        std::vector<double> h;
        for (double x : reference_nodes(N)) h.push_back(a(x) * b(x));
        EXPECT_NEAR(weighted_dot(a, b), glc_quadrature(h), 1e-12);
    }
}

TEST(Clenshaw, MatchesDirectSum) {
    std::mt19937_64 rng(18);
    const auto c = oracle::random_array(rng, {4, 3, 5});
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        EXPECT_NEAR(clenshaw_nd(c, x), oracle::eval_series(c, x), 1e-13);
    }
}
