#pragma once

#include "chebrb/ndarray.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace chebrb {

/// Univariate Chebyshev series sum_l c_l T_l(x) on [-1, 1].
struct ChebSeries1D {
    std::vector<double> coeffs;

    std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    /// Clenshaw evaluation; x is not range-checked.
    double operator()(double x) const noexcept;
};

/// Chebyshev-Gauss-Lobatto nodes mapped to [a, b], in descending order.
struct NodeGrid1D {
    double a = -1.0;
    double b = 1.0;
    std::vector<double> nodes;  // nodes[0] == b, nodes[N] == a

    std::size_t count() const noexcept { return nodes.size(); }
};

/// Matrix of T_l(x_k), extents [degree_max + 1, points.size()], built by
/// the three-term recurrence. Points must lie in [-1, 1] up to 1e-12.
NdArray cheb_poly_values(std::size_t degree_max, std::span<const double> points);

/// The N+1 extrema of T_N mapped to [a, b]: 0.5 (cos(pi k / N)(b - a) + b + a).
NodeGrid1D nodes(std::size_t N, double a, double b);

/// Reference-interval nodes cos(pi k / N), k = 0..N.
std::vector<double> reference_nodes(std::size_t N);

/// Chebyshev coefficients from values at the N+1 Lobatto nodes (node order
/// k = 0..N, i.e. descending x), via the even extension and a length-2N FFT.
ChebSeries1D coeffs_1d(std::span<const double> values_at_nodes);

/// Coefficient tensor from values on a full tensor node grid: one sweep of
/// coeffs_1d along the leading axis followed by permute_cycle, per axis.
NdArray coeffs_nd(const NdArray& values);

/// Coefficients of the derivative on [-1, 1] (length N for input length N+1).
/// A mapped interval [a, b] needs the extra factor 2 / (b - a).
ChebSeries1D derivative_coeffs(const ChebSeries1D& s);

/// Weight of coefficient index l in the Chebyshev-weighted L2 product:
/// pi for l == 0, pi / 2 otherwise.
double chebyshev_weight(std::size_t l) noexcept;

/// Per-entry weights of a coefficient tensor (product of chebyshev_weight
/// across axes), flattened in row-major order.
std::vector<double> weight_tensor(std::span<const std::size_t> extents);

/// Weighted L2 inner product computed exactly in coefficient space.
double weighted_dot(const ChebSeries1D& a, const ChebSeries1D& b);
double weighted_dot(const NdArray& a, const NdArray& b);

/// Gauss-Lobatto-Chebyshev rule: (pi/N)[H_0/2 + sum_{j=1}^{N-1} H_j + H_N/2].
double glc_quadrature(std::span<const double> values_at_nodes);

/// Evaluates a coefficient tensor at one point of [-1, 1]^n by nested
/// Clenshaw recurrences (innermost axis last).
double clenshaw_nd(const NdArray& coeffs, std::span<const double> x);

}  // namespace chebrb
