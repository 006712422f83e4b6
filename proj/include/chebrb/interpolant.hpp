#pragma once

#include "chebrb/ndarray.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace chebrb {

struct Bounds {
    double min = -1.0;
    double max = 1.0;

    double width() const noexcept { return max - min; }
    bool operator==(const Bounds&) const = default;
};

/// Box [min_j, max_j]^n with the affine map onto the reference cube [-1, 1]^n.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<Bounds> bounds);

    std::size_t dims() const noexcept { return bounds_.size(); }
    const Bounds& operator[](std::size_t j) const { return bounds_.at(j); }
    const std::vector<Bounds>& bounds() const noexcept { return bounds_; }

    /// Maps a domain coordinate to [-1, 1]; throws DomainError when the value
    /// lies outside the bounds by more than a 1e-12 relative slack.
    double to_reference(std::size_t dim, double value) const;
    double from_reference(std::size_t dim, double x) const noexcept;
    bool contains(std::size_t dim, double value) const noexcept;

    bool operator==(const Domain&) const = default;

private:
    std::vector<Bounds> bounds_;
};

std::vector<double> to_reference(const Domain& domain, std::span<const double> point);
std::vector<double> from_reference(const Domain& domain, std::span<const double> x);

/// Per-dimension value lists; the grid is their Cartesian product.
struct ProductGrid {
    std::vector<std::vector<double>> axes;

    std::size_t dims() const noexcept { return axes.size(); }
    std::vector<std::size_t> extents() const;
    std::size_t size() const;
};

/// Chebyshev node grid of a domain (descending order per axis).
ProductGrid node_grid(const Domain& domain, std::span<const std::size_t> degrees);

/// Interior equally spaced control grid: min + i (max - min) / m for
/// i = 1..m-1 on every axis.
ProductGrid control_grid(const Domain& domain, std::size_t m);

/// Slice decomposition of a coefficient tensor along one axis: slice k holds
/// the coefficients of P restricted to the k-th Chebyshev node of that axis.
struct SplitStorage {
    std::size_t axis = 0;
    std::vector<NdArray> slices;
};

/// Tensor-product Chebyshev interpolant over a box, either as one
/// coefficient tensor or in split form.
class Interpolant {
public:
    Interpolant(Domain domain, NdArray coeffs);
    Interpolant(Domain domain, std::vector<std::size_t> degrees, SplitStorage split);

    const Domain& domain() const noexcept { return domain_; }
    std::size_t dims() const noexcept { return domain_.dims(); }
    const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }
    bool is_split() const noexcept { return split_.has_value(); }

    /// Full coefficient tensor; throws DimensionError in split form.
    const NdArray& coeffs() const;
    const SplitStorage& split_storage() const;

private:
    Domain domain_;
    std::vector<std::size_t> degrees_;
    NdArray coeffs_;
    std::optional<SplitStorage> split_;
};

using Oracle = std::function<double(std::span<const double>)>;

/// Oracle that also receives the flat row-major index of the tensor node
/// being evaluated, for per-node seeding.
using IndexedOracle = std::function<double(std::span<const double>, std::size_t)>;

struct BuildOptions {
    std::size_t threads = 1;  // 0 = hardware concurrency
};

/// Evaluates the oracle at every tensor node and transforms the values into
/// Chebyshev coefficients. Exceptions from the oracle are rethrown as
/// OracleError naming the node.
Interpolant build(const IndexedOracle& oracle, const Domain& domain,
                  std::span<const std::size_t> degrees, const BuildOptions& opts = {});
Interpolant build(const Oracle& oracle, const Domain& domain,
                  std::span<const std::size_t> degrees, const BuildOptions& opts = {});

/// Builds directly in split form, one slice of `axis` at a time. Node
/// indices passed to the oracle match those of the unsplit build.
Interpolant build_split(const IndexedOracle& oracle, const Domain& domain,
                        std::span<const std::size_t> degrees, std::size_t axis,
                        const BuildOptions& opts = {});

/// Tensorial evaluation of coefficients on a product grid given in
/// reference coordinates: ((A (x) T(eta_1)) (x) T(eta_2)) ... (x) T(eta_n).
NdArray eval_reference_grid(const NdArray& coeffs,
                            const std::vector<std::vector<double>>& reference_axes);

NdArray eval_grid(const Interpolant& p, const ProductGrid& grid);
double eval_point(const Interpolant& p, std::span<const double> point);

/// Forward difference in reference coordinates with the chain-rule factor
/// 2 / (b - a). Falls back to a backward difference when x + h leaves
/// [-1, 1].
double fd_partial(const std::function<double(std::span<const double>)>& eval,
                  const Domain& domain, std::span<const double> point, std::size_t dim,
                  double h = 1e-6);
double fd_partial(const Interpolant& p, std::span<const double> point, std::size_t dim,
                  double h = 1e-6);

/// Converts to split form along `axis`.
Interpolant split(const Interpolant& p, std::size_t axis);

/// Reorders variables: result dimension k is input dimension order[k].
Interpolant reorder(const Interpolant& p, std::span<const std::size_t> order);

/// Mean squared difference between the interpolant on `grid` and
/// `reference_values` (same extents as the grid).
double mse_on_grid(const Interpolant& p, const NdArray& reference_values,
                   const ProductGrid& grid);

/// Mean squared difference of two equally sized value sets.
double mean_squared_difference(std::span<const double> a, std::span<const double> b);

}  // namespace chebrb
