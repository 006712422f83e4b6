#pragma once

#include "chebrb/chebyshev.hpp"
#include "chebrb/interpolant.hpp"
#include "chebrb/ndarray.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace chebrb {

/// Hierarchically truncated polynomial
///
///   Q = sum_{i_1..i_{n-1}} A^1_{i_1}(x_1) A^2_{i_1 i_2}(x_2) ...
///       A^{n-1}_{i_1..i_{n-1}}(x_{n-1}) q_{i_1..i_{n-1}}(x_n)
///
/// stored as Chebyshev coefficient arrays. Level j < n has extents
/// [M_1+1, .., M_j+1, N_j+1]; the terminal level has extents
/// [M_1+1, .., M_{n-1}+1, N_n+1]. For n == 1 the single level is the plain
/// coefficient vector.
class ReducedPolynomial {
public:
    ReducedPolynomial(Domain domain, std::vector<std::size_t> degrees,
                      std::vector<std::size_t> retained, std::vector<NdArray> levels);

    const Domain& domain() const noexcept { return domain_; }
    std::size_t dims() const noexcept { return degrees_.size(); }
    const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }
    /// [M_1, .., M_{n-1}, N_n]
    const std::vector<std::size_t>& retained() const noexcept { return retained_; }
    const std::vector<NdArray>& levels() const noexcept { return levels_; }

private:
    Domain domain_;
    std::vector<std::size_t> degrees_;
    std::vector<std::size_t> retained_;
    std::vector<NdArray> levels_;
};

/// Explicit point set, domain coordinates, one row per point.
struct PointSet {
    std::vector<std::vector<double>> points;
};

struct TruncationSpec {
    /// MSE budget on the control set.
    double epsilon = 1e-8;
    /// Control set; monostate selects the interpolant's own tensor nodes.
    std::variant<std::monostate, ProductGrid, PointSet> phi;
    /// When even full retention misses epsilon (round-off), keep everything
    /// and flag it instead of throwing TruncationError.
    bool allow_roundoff_floor = true;
    /// Relative norm below which candidates and residuals count as zero.
    double basis_rel_tol = 1e-14;
};

/// Result of one greedy orthonormalization level.
struct LevelBasis {
    /// Orthonormal basis functions (coefficient tensors over the remaining
    /// variables) in selection order.
    std::vector<NdArray> basis;
    /// Index of the nodal slice each basis element was generated from.
    std::vector<std::size_t> selected;
    /// A_k(x) = <P, q_k> over the remaining variables, one per basis element.
    std::vector<ChebSeries1D> coefficient_functions;
};

/// P(alpha^i, x_2..x_n) for every Chebyshev node alpha^i of the leading
/// variable, as coefficient tensors over the remaining variables.
std::vector<NdArray> nodal_slices(const NdArray& coeffs);
std::vector<NdArray> nodal_slices(const Interpolant& p);

/// Greedy Gram-Schmidt over the nodal slices of a polynomial: each round
/// orthonormalizes the unselected slices against the chosen basis and keeps
/// the one leaving the smallest weighted residual. Stops when candidates
/// are exhausted or the residual norm drops below rel_tol times the initial
/// norm.
LevelBasis greedy_orthonormal_level(std::span<const NdArray> slices, double rel_tol = 1e-14);

struct CompressResult {
    ReducedPolynomial poly;
    /// MSE of poly against the source on the control set, recomputed after
    /// assembly.
    double mse_phi = 0.0;
    /// Achieved MSE after choosing each M_j.
    std::vector<double> level_mse;
    /// True when some level could not reach epsilon even untruncated.
    bool floor_limited = false;
};

CompressResult compress_with_report(const Interpolant& p, const TruncationSpec& spec);
ReducedPolynomial compress(const Interpolant& p, const TruncationSpec& spec);

struct LevelOneRow {
    std::size_t retained = 0;  // M_1 + 1
    std::uint64_t storage_bytes = 0;
    double mse_phi = 0.0;
};

/// MSE on the control set after the first level only, for every retained
/// count M_1 + 1 = 1..K (remaining variables untruncated).
std::vector<LevelOneRow> level_one_profile(const Interpolant& p, const TruncationSpec& spec);

/// Tensorial evaluation: A^1(eta_1) ~(x) (... ~(x) (A^{n-1}(eta_{n-1}) ~(x) q(eta_n))).
NdArray eval_reduced_grid(const ReducedPolynomial& q, const ProductGrid& grid);
double eval_point(const ReducedPolynomial& q, std::span<const double> point);
double fd_partial(const ReducedPolynomial& q, std::span<const double> point, std::size_t dim,
                  double h = 1e-6);

/// Full coefficient tensor [N_1+1, .., N_n+1] equivalent to q.
NdArray expand(const ReducedPolynomial& q);

struct StorageReport {
    std::uint64_t full_bytes = 0;
    std::uint64_t reduced_bytes = 0;
    double savings_fraction = 0.0;
};

StorageReport storage_report(const ReducedPolynomial& q, std::span<const std::size_t> full_extents);

}  // namespace chebrb
