#include "chebrb/chebyshev.hpp"

#include "chebrb/errors.hpp"
#include "fft.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace chebrb {

namespace {

constexpr double kReferenceSlack = 1e-12;

double clenshaw(const double* c, std::size_t len, double x) noexcept {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = len; k-- > 1;) {
        const double b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + x * b1 - b2;
}

}  // namespace

double ChebSeries1D::operator()(double x) const noexcept {
    if (coeffs.empty()) return 0.0;
    return clenshaw(coeffs.data(), coeffs.size(), x);
}

NdArray cheb_poly_values(std::size_t degree_max, std::span<const double> points) {
    const std::size_t q = points.size();
    if (q == 0) throw DimensionError("cheb_poly_values: no points");
    for (double x : points) {
        if (!(x >= -1.0 - kReferenceSlack && x <= 1.0 + kReferenceSlack)) {
            throw DomainError("cheb_poly_values: point " + std::to_string(x) +
                              " outside [-1, 1]");
        }
    }
    NdArray t({degree_max + 1, q});
    auto d = t.data();
    for (std::size_t k = 0; k < q; ++k) d[k] = 1.0;
    if (degree_max >= 1) {
        for (std::size_t k = 0; k < q; ++k) d[q + k] = points[k];
    }
    for (std::size_t l = 2; l <= degree_max; ++l) {
        for (std::size_t k = 0; k < q; ++k) {
            d[l * q + k] = 2.0 * points[k] * d[(l - 1) * q + k] - d[(l - 2) * q + k];
        }
    }
    return t;
}

std::vector<double> reference_nodes(std::size_t N) {
    if (N == 0) throw DomainError("nodes: N must be >= 1");
    std::vector<double> x(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        x[k] = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
    }
    // Exact symmetric values where cos() rounds (e.g. cos(pi/2) != 0).
    x[0] = 1.0;
    x[N] = -1.0;
    if (N % 2 == 0) x[N / 2] = 0.0;
    for (std::size_t k = 1; k < (N + 1) / 2; ++k) x[N - k] = -x[k];
    return x;
}

NodeGrid1D nodes(std::size_t N, double a, double b) {
    if (!(a < b)) throw DomainError("nodes: require a < b");
    NodeGrid1D g{a, b, reference_nodes(N)};
    for (auto& x : g.nodes) x = 0.5 * (x * (b - a) + (b + a));
    g.nodes.front() = b;
    g.nodes.back() = a;
    return g;
}

ChebSeries1D coeffs_1d(std::span<const double> values_at_nodes) {
    if (values_at_nodes.size() < 2) throw DomainError("coeffs_1d: need at least 2 values");
    const std::size_t N = values_at_nodes.size() - 1;
    const std::size_t len = 2 * N;

    // Even extension [F_0 .. F_N, F_{N-1} .. F_1].
    std::vector<std::complex<double>> z(len);
    for (std::size_t k = 0; k <= N; ++k) z[k] = values_at_nodes[k];
    for (std::size_t k = 1; k < N; ++k) z[len - k] = values_at_nodes[k];

    const auto Z = detail::fft(z);
    std::vector<double> y(len);
    for (std::size_t k = 0; k < len; ++k) y[k] = Z[k].real() / static_cast<double>(len);

    ChebSeries1D s;
    s.coeffs.resize(N + 1);
    s.coeffs[0] = y[0];
    for (std::size_t l = 1; l < N; ++l) s.coeffs[l] = y[l] + y[len - l];
    s.coeffs[N] = y[N];
    return s;
}

NdArray coeffs_nd(const NdArray& values) {
    for (auto e : values.extents()) {
        if (e < 2) throw DomainError("coeffs_nd: every extent must be >= 2");
    }
    if (values.rank() == 0) throw DomainError("coeffs_nd: rank-0 input");

    NdArray b = values;
    std::vector<double> column;
    for (std::size_t sweep = 0; sweep < values.rank(); ++sweep) {
        const std::size_t lead = b.extent(0);
        const std::size_t rest = b.size() / lead;
        column.resize(lead);
        auto d = b.data();
        for (std::size_t j = 0; j < rest; ++j) {
            for (std::size_t i = 0; i < lead; ++i) column[i] = d[i * rest + j];
            const auto c = coeffs_1d(column);
            for (std::size_t i = 0; i < lead; ++i) d[i * rest + j] = c.coeffs[i];
        }
        if (b.rank() >= 2) b = permute_cycle(b);
    }
    return b;
}

ChebSeries1D derivative_coeffs(const ChebSeries1D& s) {
    if (s.coeffs.size() < 2) throw DomainError("derivative_coeffs: need length >= 2");
    const std::size_t N = s.coeffs.size() - 1;
    ChebSeries1D q;
    q.coeffs.assign(N, 0.0);
    // Backward recurrence q_{l-1} c_{l-1} = q_{l+1} + 2 l p_l, equivalent to
    // q_l = (2 / c_l) sum_{j > l, j + l odd} j p_j.
    double next = 0.0;   // q_{l+1}
    double next2 = 0.0;  // q_{l+2}
    for (std::size_t l = N; l-- > 0;) {
        const double ql = next2 + 2.0 * static_cast<double>(l + 1) * s.coeffs[l + 1];
        next2 = next;
        next = ql;
        q.coeffs[l] = ql;
    }
    q.coeffs[0] *= 0.5;
    return q;
}

double chebyshev_weight(std::size_t l) noexcept {
    return l == 0 ? std::numbers::pi : 0.5 * std::numbers::pi;
}

std::vector<double> weight_tensor(std::span<const std::size_t> extents) {
    std::vector<double> w(1, 1.0);
    for (auto e : extents) {
        std::vector<double> next;
        next.reserve(w.size() * e);
        for (double v : w) {
            for (std::size_t l = 0; l < e; ++l) next.push_back(v * chebyshev_weight(l));
        }
        w = std::move(next);
    }
    return w;
}

double weighted_dot(const ChebSeries1D& a, const ChebSeries1D& b) {
    if (a.coeffs.size() != b.coeffs.size()) throw DimensionError("weighted_dot: length mismatch");
    double s = 0.0;
    for (std::size_t l = 0; l < a.coeffs.size(); ++l) {
        s += chebyshev_weight(l) * a.coeffs[l] * b.coeffs[l];
    }
    return s;
}

double weighted_dot(const NdArray& a, const NdArray& b) {
    if (a.extents() != b.extents()) throw DimensionError("weighted_dot: shape mismatch");
    const auto w = weight_tensor(a.extents());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

double glc_quadrature(std::span<const double> values_at_nodes) {
    if (values_at_nodes.size() < 2) throw DomainError("glc_quadrature: need at least 2 values");
    const std::size_t N = values_at_nodes.size() - 1;
    double s = 0.5 * (values_at_nodes.front() + values_at_nodes.back());
    for (std::size_t j = 1; j < N; ++j) s += values_at_nodes[j];
    return std::numbers::pi / static_cast<double>(N) * s;
}

double clenshaw_nd(const NdArray& coeffs, std::span<const double> x) {
    if (x.size() != coeffs.rank()) throw DimensionError("clenshaw_nd: point dimension mismatch");
    std::vector<double> cur(coeffs.data().begin(), coeffs.data().end());
    for (std::size_t axis = coeffs.rank(); axis-- > 0;) {
        const std::size_t len = coeffs.extent(axis);
        const std::size_t rows = cur.size() / len;
        std::vector<double> next(rows);
        for (std::size_t r = 0; r < rows; ++r) next[r] = clenshaw(cur.data() + r * len, len, x[axis]);
        cur = std::move(next);
    }
    return cur[0];
}

}  // namespace chebrb
