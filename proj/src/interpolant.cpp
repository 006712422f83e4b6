#include "chebrb/interpolant.hpp"

#include "chebrb/chebyshev.hpp"
#include "chebrb/errors.hpp"
#include "chebrb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace chebrb {

namespace {

double slack(const Bounds& b) noexcept {
    return 1e-12 * std::max({b.width(), std::abs(b.min), std::abs(b.max)});
}

std::string point_str(std::span<const double> p) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

void check_degrees(const Domain& domain, std::span<const std::size_t> degrees) {
    if (degrees.size() != domain.dims()) {
        throw DimensionError("degree count " + std::to_string(degrees.size()) +
                             " != domain dimension " + std::to_string(domain.dims()));
    }
    if (degrees.empty()) throw DimensionError("interpolant needs at least one dimension");
    for (auto N : degrees) {
        if (N < 1) throw DomainError("every degree must be >= 1");
    }
}

std::vector<std::size_t> extents_of(std::span<const std::size_t> degrees) {
    std::vector<std::size_t> e(degrees.size());
    for (std::size_t j = 0; j < degrees.size(); ++j) e[j] = degrees[j] + 1;
    return e;
}

// Node values of the oracle on a tensor grid given by per-axis node lists.
// `index_of` maps a local flat index to the global node index reported to the
// oracle, and `fill_point` writes the full domain point.
template <class IndexOf, class FillPoint>
NdArray sample_nodes(const IndexedOracle& oracle, std::vector<std::size_t> extents,
                     std::size_t point_dims, IndexOf index_of, FillPoint fill_point,
                     std::size_t threads) {
    NdArray values(std::move(extents));
    const std::size_t count = values.size();
    parallel_for(count, threads, [&](std::size_t flat) {
        std::vector<double> point(point_dims);
        fill_point(flat, point);
        const std::size_t node = index_of(flat);
        try {
            values[flat] = oracle(point, node);
        } catch (const std::exception& e) {
            throw OracleError("oracle failed at node " + std::to_string(node) + " " +
                              point_str(point) + ": " + e.what());
        }
    });
    return values;
}

std::vector<std::size_t> unravel(std::size_t flat, std::span<const std::size_t> extents) {
    std::vector<std::size_t> idx(extents.size());
    for (std::size_t k = extents.size(); k-- > 0;) {
        idx[k] = flat % extents[k];
        flat /= extents[k];
    }
    return idx;
}

// Maps nodal values of the split axis to values at arbitrary reference points:
// L[i, k] = sum_l T_l(x_i) C[l, k], C the nodal-to-coefficient map.
NdArray nodal_to_points(std::size_t N, std::span<const double> ref_points) {
    const NdArray T = cheb_poly_values(N, ref_points);
    const std::size_t q = ref_points.size();
    NdArray L({q, N + 1});
    std::vector<double> unit(N + 1, 0.0);
    for (std::size_t k = 0; k <= N; ++k) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[k] = 1.0;
        const auto c = coeffs_1d(unit);
        for (std::size_t i = 0; i < q; ++i) {
            double s = 0.0;
            for (std::size_t l = 0; l <= N; ++l) s += T[l * q + i] * c.coeffs[l];
            L[i * (N + 1) + k] = s;
        }
    }
    return L;
}

std::vector<std::vector<double>> reference_axes(const Domain& domain, const ProductGrid& grid) {
    if (grid.dims() != domain.dims()) {
        throw DimensionError("grid dimension " + std::to_string(grid.dims()) +
                             " != interpolant dimension " + std::to_string(domain.dims()));
    }
    std::vector<std::vector<double>> ref(grid.dims());
    for (std::size_t j = 0; j < grid.dims(); ++j) {
        if (grid.axes[j].empty()) throw DimensionError("grid axis " + std::to_string(j) + " is empty");
        ref[j].reserve(grid.axes[j].size());
        for (double v : grid.axes[j]) ref[j].push_back(domain.to_reference(j, v));
    }
    return ref;
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain and grids
// ---------------------------------------------------------------------------

Domain::Domain(std::vector<Bounds> bounds) : bounds_(std::move(bounds)) {
    for (std::size_t j = 0; j < bounds_.size(); ++j) {
        if (!(bounds_[j].min < bounds_[j].max)) {
            throw DomainError("domain dimension " + std::to_string(j) + ": require min < max");
        }
    }
}

bool Domain::contains(std::size_t dim, double value) const noexcept {
    const auto& b = bounds_[dim];
    const double s = slack(b);
    return value >= b.min - s && value <= b.max + s;
}

double Domain::to_reference(std::size_t dim, double value) const {
    const auto& b = bounds_.at(dim);
    if (!contains(dim, value)) {
        std::ostringstream os;
        os.precision(17);
        os << "dimension " << dim << ": value " << value << " outside [" << b.min << ", "
           << b.max << "]";
        throw DomainError(os.str());
    }
    const double x = (2.0 * value - (b.max + b.min)) / b.width();
    return std::clamp(x, -1.0, 1.0);
}

double Domain::from_reference(std::size_t dim, double x) const noexcept {
    const auto& b = bounds_[dim];
    return 0.5 * (x * b.width() + (b.max + b.min));
}

std::vector<double> to_reference(const Domain& domain, std::span<const double> point) {
    if (point.size() != domain.dims()) throw DimensionError("point dimension mismatch");
    std::vector<double> x(point.size());
    for (std::size_t j = 0; j < point.size(); ++j) x[j] = domain.to_reference(j, point[j]);
    return x;
}

std::vector<double> from_reference(const Domain& domain, std::span<const double> x) {
    if (x.size() != domain.dims()) throw DimensionError("point dimension mismatch");
    std::vector<double> p(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) p[j] = domain.from_reference(j, x[j]);
    return p;
}

std::vector<std::size_t> ProductGrid::extents() const {
    std::vector<std::size_t> e;
    e.reserve(axes.size());
    for (const auto& a : axes) e.push_back(a.size());
    return e;
}

std::size_t ProductGrid::size() const {
    const auto e = extents();
    return product(e);
}

ProductGrid node_grid(const Domain& domain, std::span<const std::size_t> degrees) {
    check_degrees(domain, degrees);
    ProductGrid g;
    for (std::size_t j = 0; j < degrees.size(); ++j) {
        g.axes.push_back(nodes(degrees[j], domain[j].min, domain[j].max).nodes);
    }
    return g;
}

ProductGrid control_grid(const Domain& domain, std::size_t m) {
    if (m < 2) throw DomainError("control_grid: m must be >= 2");
    ProductGrid g;
    for (const auto& b : domain.bounds()) {
        std::vector<double> axis;
        const double delta = b.width() / static_cast<double>(m);
        for (std::size_t i = 1; i < m; ++i) axis.push_back(b.min + delta * static_cast<double>(i));
        g.axes.push_back(std::move(axis));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Interpolant
// ---------------------------------------------------------------------------

Interpolant::Interpolant(Domain domain, NdArray coeffs)
    : domain_(std::move(domain)), coeffs_(std::move(coeffs)) {
    if (coeffs_.rank() != domain_.dims() || coeffs_.rank() == 0) {
        throw DimensionError("interpolant: coefficient rank != domain dimension");
    }
    for (auto e : coeffs_.extents()) {
        if (e < 2) throw DimensionError("interpolant: coefficient extents must be >= 2");
        degrees_.push_back(e - 1);
    }
}

Interpolant::Interpolant(Domain domain, std::vector<std::size_t> degrees, SplitStorage split)
    : domain_(std::move(domain)), degrees_(std::move(degrees)) {
    check_degrees(domain_, degrees_);
    if (degrees_.size() < 2) throw DimensionError("split form needs at least 2 dimensions");
    if (split.axis >= degrees_.size()) throw DimensionError("split axis out of range");
    if (split.slices.size() != degrees_[split.axis] + 1) {
        throw DimensionError("split form: slice count must equal N_axis + 1");
    }
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < degrees_.size(); ++j) {
        if (j != split.axis) rest.push_back(degrees_[j] + 1);
    }
    for (const auto& s : split.slices) {
        if (s.extents() != rest) throw DimensionError("split form: slice extents mismatch");
    }
    split_ = std::move(split);
}

const NdArray& Interpolant::coeffs() const {
    if (split_) throw DimensionError("interpolant is in split form");
    return coeffs_;
}

const SplitStorage& Interpolant::split_storage() const {
    if (!split_) throw DimensionError("interpolant is not in split form");
    return *split_;
}

Interpolant build(const IndexedOracle& oracle, const Domain& domain,
                  std::span<const std::size_t> degrees, const BuildOptions& opts) {
    check_degrees(domain, degrees);
    const auto grid = node_grid(domain, degrees);
    const auto ext = extents_of(degrees);
    const std::size_t n = degrees.size();
    auto values = sample_nodes(
        oracle, ext, n, [](std::size_t flat) { return flat; },
        [&](std::size_t flat, std::vector<double>& point) {
            const auto idx = unravel(flat, ext);
            for (std::size_t j = 0; j < n; ++j) point[j] = grid.axes[j][idx[j]];
        },
        opts.threads);
    return Interpolant(domain, coeffs_nd(values));
}

Interpolant build(const Oracle& oracle, const Domain& domain,
                  std::span<const std::size_t> degrees, const BuildOptions& opts) {
    return build(IndexedOracle([&](std::span<const double> x, std::size_t) { return oracle(x); }),
                 domain, degrees, opts);
}

Interpolant build_split(const IndexedOracle& oracle, const Domain& domain,
                        std::span<const std::size_t> degrees, std::size_t axis,
                        const BuildOptions& opts) {
    check_degrees(domain, degrees);
    const std::size_t n = degrees.size();
    if (n < 2) throw DimensionError("build_split: need at least 2 dimensions");
    if (axis >= n) throw DimensionError("build_split: axis out of range");
    const auto grid = node_grid(domain, degrees);
    const auto full_ext = extents_of(degrees);
    std::vector<std::size_t> rest_ext;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != axis) rest_ext.push_back(full_ext[j]);
    }

    SplitStorage storage{axis, {}};
    for (std::size_t k = 0; k <= degrees[axis]; ++k) {
        auto full_index = [&](std::size_t flat) {
            auto ridx = unravel(flat, rest_ext);
            std::vector<std::size_t> idx(n);
            for (std::size_t j = 0, r = 0; j < n; ++j) idx[j] = (j == axis) ? k : ridx[r++];
            std::size_t off = 0;
            for (std::size_t j = 0; j < n; ++j) off = off * full_ext[j] + idx[j];
            return off;
        };
        auto values = sample_nodes(
            oracle, rest_ext, n, full_index,
            [&](std::size_t flat, std::vector<double>& point) {
                const auto ridx = unravel(flat, rest_ext);
                for (std::size_t j = 0, r = 0; j < n; ++j) {
                    point[j] = (j == axis) ? grid.axes[j][k] : grid.axes[j][ridx[r++]];
                }
            },
            opts.threads);
        storage.slices.push_back(coeffs_nd(values));
    }
    return Interpolant(domain, std::vector<std::size_t>(degrees.begin(), degrees.end()),
                       std::move(storage));
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

NdArray eval_reference_grid(const NdArray& coeffs,
                            const std::vector<std::vector<double>>& reference_axes) {
    if (reference_axes.size() != coeffs.rank()) {
        throw DimensionError("eval: grid dimension != coefficient rank");
    }
    NdArray acc = coeffs;
    for (std::size_t j = 0; j < reference_axes.size(); ++j) {
        const NdArray T = cheb_poly_values(coeffs.extent(j) - 1, reference_axes[j]);
        acc = tensor_contract(acc, T);
    }
    return acc;
}

NdArray eval_grid(const Interpolant& p, const ProductGrid& grid) {
    const auto ref = reference_axes(p.domain(), grid);
    if (!p.is_split()) return eval_reference_grid(p.coeffs(), ref);

    // Split form: evaluate one slice at a time and recombine the nodal values
    // along the split axis through the nodal-to-point interpolation matrix.
    const auto& st = p.split_storage();
    const std::size_t axis = st.axis;
    const std::size_t N = p.degrees()[axis];
    const NdArray L = nodal_to_points(N, ref[axis]);
    const std::size_t q_axis = ref[axis].size();

    std::vector<std::vector<double>> rest_ref;
    for (std::size_t j = 0; j < ref.size(); ++j) {
        if (j != axis) rest_ref.push_back(ref[j]);
    }
    const std::size_t rest_size = [&] {
        std::size_t s = 1;
        for (const auto& a : rest_ref) s *= a.size();
        return s;
    }();

    // Accumulate with the split axis leading, then rotate it into place.
    std::vector<double> acc(q_axis * rest_size, 0.0);
    for (std::size_t k = 0; k <= N; ++k) {
        const NdArray sk = eval_reference_grid(st.slices[k], rest_ref);
        for (std::size_t i = 0; i < q_axis; ++i) {
            const double w = L[i * (N + 1) + k];
            double* row = acc.data() + i * rest_size;
            for (std::size_t r = 0; r < rest_size; ++r) row[r] += w * sk[r];
        }
    }
    std::vector<std::size_t> lead_ext{q_axis};
    for (const auto& a : rest_ref) lead_ext.push_back(a.size());
    NdArray lead(lead_ext, std::move(acc));
    if (axis == 0) return lead;

    // lead axes are (axis, others...); output axis j takes lead axis order[j].
    std::vector<std::size_t> order(ref.size());
    for (std::size_t j = 0, r = 1; j < ref.size(); ++j) order[j] = (j == axis) ? 0 : r++;
    return permute_axes(lead, order);
}

double eval_point(const Interpolant& p, std::span<const double> point) {
    if (point.size() != p.dims()) throw DimensionError("eval_point: point dimension mismatch");
    ProductGrid g;
    for (double v : point) g.axes.push_back({v});
    return eval_grid(p, g)[0];
}

double fd_partial(const std::function<double(std::span<const double>)>& eval,
                  const Domain& domain, std::span<const double> point, std::size_t dim,
                  double h) {
    if (dim >= domain.dims()) throw DimensionError("fd_partial: dimension out of range");
    if (!(h > 0.0 && h < 1.0)) throw DomainError("fd_partial: require 0 < h < 1");
    const double x = domain.to_reference(dim, point[dim]);
    std::vector<double> shifted(point.begin(), point.end());
    const double base = eval(point);
    double diff;
    if (x + h <= 1.0) {
        shifted[dim] = domain.from_reference(dim, x + h);
        diff = eval(shifted) - base;
    } else {
        shifted[dim] = domain.from_reference(dim, x - h);
        diff = base - eval(shifted);
    }
    return 2.0 / domain[dim].width() * diff / h;
}

double fd_partial(const Interpolant& p, std::span<const double> point, std::size_t dim,
                  double h) {
    return fd_partial([&](std::span<const double> x) { return eval_point(p, x); }, p.domain(),
                      point, dim, h);
}

Interpolant split(const Interpolant& p, std::size_t axis) {
    if (axis >= p.dims()) throw DimensionError("split: axis out of range");
    if (p.is_split()) throw DimensionError("split: interpolant already split");
    if (p.dims() < 2) throw DimensionError("split: need at least 2 dimensions");
    const std::size_t n = p.dims();
    const std::size_t N = p.degrees()[axis];

    // Bring the split axis to the front, contract with T_l(alpha^k).
    std::vector<std::size_t> order{axis};
    for (std::size_t j = 0; j < n; ++j) {
        if (j != axis) order.push_back(j);
    }
    const NdArray lead = permute_axes(p.coeffs(), order);
    const NdArray T = cheb_poly_values(N, reference_nodes(N));
    const NdArray C = tensor_contract(lead, T);  // [rest..., N+1]

    std::vector<std::size_t> rest_ext(lead.extents().begin() + 1, lead.extents().end());
    const std::size_t rest = product(rest_ext);
    SplitStorage st{axis, {}};
    for (std::size_t k = 0; k <= N; ++k) {
        std::vector<double> d(rest);
        for (std::size_t r = 0; r < rest; ++r) d[r] = C[r * (N + 1) + k];
        st.slices.emplace_back(rest_ext, std::move(d));
    }
    return Interpolant(p.domain(), p.degrees(), std::move(st));
}

Interpolant reorder(const Interpolant& p, std::span<const std::size_t> order) {
    if (p.is_split()) throw DimensionError("reorder: split form not supported");
    if (order.size() != p.dims()) throw DimensionError("reorder: order length mismatch");
    std::vector<Bounds> b(order.size());
    const NdArray c = permute_axes(p.coeffs(), order);
    for (std::size_t k = 0; k < order.size(); ++k) b[k] = p.domain()[order[k]];
    return Interpolant(Domain(std::move(b)), c);
}

double mean_squared_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("mse: size mismatch");
    if (a.empty()) throw DimensionError("mse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

double mse_on_grid(const Interpolant& p, const NdArray& reference_values, const ProductGrid& grid) {
    if (reference_values.extents() != grid.extents()) {
        throw DimensionError("mse_on_grid: reference extents != grid extents");
    }
    const NdArray v = eval_grid(p, grid);
    return mean_squared_difference(v.data(), reference_values.data());
}

}  // namespace chebrb
