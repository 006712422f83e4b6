#include "chebrb/reduced_basis.hpp"

#include "chebrb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chebrb {

namespace {

// Nodal values -> Chebyshev coefficients as a dense (N+1)x(N+1) matrix.
std::vector<double> nodal_to_coeff_matrix(std::size_t m) {
    std::vector<double> C(m * m);
    std::vector<double> unit(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[i] = 1.0;
        const auto c = coeffs_1d(unit);
        for (std::size_t l = 0; l < m; ++l) C[l * m + i] = c.coeffs[l];
    }
    return C;
}

// Weighted squared norm of the univariate series whose nodal values are v.
double nodal_series_norm2(const std::vector<double>& C, std::span<const double> v) {
    const std::size_t m = v.size();
    double s = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += C[l * m + i] * v[i];
        s += chebyshev_weight(l) * c * c;
    }
    return s;
}

double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r) s += w[r] * a[r] * b[r];
    return s;
}

// Contracts the last axis of a with T [L, q]: [P.., L] -> [P.., q].
NdArray contract_last(const NdArray& a, const NdArray& T) {
    const std::size_t L = a.extents().back();
    if (T.extent(0) != L) throw DimensionError("contract_last: extent mismatch");
    const std::size_t q = T.extent(1);
    const std::size_t rows = a.size() / L;
    std::vector<std::size_t> ext(a.extents().begin(), a.extents().end() - 1);
    ext.push_back(q);
    std::vector<double> out(rows * q, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* arow = a.data().data() + r * L;
        double* orow = out.data() + r * q;
        for (std::size_t l = 0; l < L; ++l) {
            const double c = arow[l];
            if (c == 0.0) continue;
            const double* trow = T.data().data() + l * q;
            for (std::size_t k = 0; k < q; ++k) orow[k] += c * trow[k];
        }
    }
    return NdArray(std::move(ext), std::move(out));
}

// Fold of the level arrays right to left with the batched contraction. Each
// level is first mapped through `map_level(j, A^j)`.
template <class MapLevel>
NdArray fold_levels(const ReducedPolynomial& q, MapLevel map_level) {
    const std::size_t n = q.dims();
    NdArray acc = map_level(n - 1, q.levels()[n - 1]);
    for (std::size_t j = n - 1; j-- > 0;) {
        acc = tensor_contract_batched(map_level(j, q.levels()[j]), acc);
    }
    return acc;
}

// Control set in reference coordinates, either a product grid or a list of
// points, with the handful of evaluations the truncation search needs.
class ControlSet {
public:
    ControlSet(const Interpolant& p, const TruncationSpec& spec) : n_(p.dims()) {
        if (std::holds_alternative<std::monostate>(spec.phi)) {
            grid_ = true;
            for (auto N : p.degrees()) axes_.push_back(reference_nodes(N));
        } else if (const auto* g = std::get_if<ProductGrid>(&spec.phi)) {
            grid_ = true;
            if (g->dims() != n_) throw DimensionError("control grid dimension mismatch");
            for (std::size_t j = 0; j < n_; ++j) {
                if (g->axes[j].empty()) throw DomainError("control grid axis is empty");
                std::vector<double> a;
                for (double v : g->axes[j]) a.push_back(p.domain().to_reference(j, v));
                axes_.push_back(std::move(a));
            }
        } else {
            const auto& ps = std::get<PointSet>(spec.phi);
            if (ps.points.empty()) throw DomainError("control point set is empty");
            for (const auto& pt : ps.points) pts_.push_back(to_reference(p.domain(), pt));
        }
    }

    std::size_t size() const {
        if (!grid_) return pts_.size();
        std::size_t s = 1;
        for (const auto& a : axes_) s *= a.size();
        return s;
    }

    std::vector<double> full(const NdArray& coeffs) const { return rest(coeffs, 0); }

    std::vector<double> full(const ReducedPolynomial& q) const {
        if (grid_) {
            return fold_levels(q, [&](std::size_t j, const NdArray& A) {
                       return contract_last(A, cheb_poly_values(q.degrees()[j], axes_[j]));
                   })
                .values();
        }
        const NdArray c = expand(q);
        return full(c);
    }

    std::vector<double> lead_init() const { return std::vector<double>(grid_ ? 1 : pts_.size(), 1.0); }

    std::vector<double> univariate(const ChebSeries1D& s, std::size_t dim) const {
        std::vector<double> v;
        if (grid_) {
            for (double x : axes_[dim]) v.push_back(s(x));
        } else {
            for (const auto& p : pts_) v.push_back(s(p[dim]));
        }
        return v;
    }

    // Values of a coefficient tensor over variables first..n-1.
    std::vector<double> rest(const NdArray& coeffs, std::size_t first) const {
        if (grid_) {
            std::vector<std::vector<double>> sub(axes_.begin() + first, axes_.end());
            return eval_reference_grid(coeffs, sub).values();
        }
        std::vector<double> v;
        v.reserve(pts_.size());
        for (const auto& p : pts_) {
            v.push_back(clenshaw_nd(coeffs, std::span(p).subspan(first)));
        }
        return v;
    }

    std::vector<double> combine(const std::vector<double>& lead, const std::vector<double>& uni) const {
        std::vector<double> out;
        if (grid_) {
            out.reserve(lead.size() * uni.size());
            for (double a : lead) {
                for (double u : uni) out.push_back(a * u);
            }
        } else {
            out.resize(lead.size());
            for (std::size_t i = 0; i < lead.size(); ++i) out[i] = lead[i] * uni[i];
        }
        return out;
    }

    void subtract_term(std::vector<double>& err, const std::vector<double>& lead,
                       const std::vector<double>& uni, const std::vector<double>& rest) const {
        if (grid_) {
            const std::size_t U = uni.size(), R = rest.size();
            for (std::size_t a = 0; a < lead.size(); ++a) {
                for (std::size_t u = 0; u < U; ++u) {
                    const double f = lead[a] * uni[u];
                    double* e = err.data() + (a * U + u) * R;
                    for (std::size_t r = 0; r < R; ++r) e[r] -= f * rest[r];
                }
            }
        } else {
            for (std::size_t i = 0; i < err.size(); ++i) err[i] -= lead[i] * uni[i] * rest[i];
        }
    }

private:
    std::size_t n_;
    bool grid_ = false;
    std::vector<std::vector<double>> axes_;
    std::vector<std::vector<double>> pts_;
};

double mean_square(const std::vector<double>& e) {
    double s = 0.0;
    for (double v : e) s += v * v;
    return s / static_cast<double>(e.size());
}

struct Branch {
    NdArray poly;               // over variables j..n-1
    bool empty = false;         // zero-padded branch
    std::vector<double> lead;   // product of earlier A factors on the control set
};

// Truncation search at one level: subtract terms in order k = 0,1,.. across
// all branches until the MSE drops below epsilon. Returns the chosen M and
// the MSE history (one entry per k tried).
struct LevelChoice {
    std::size_t M = 0;
    bool met = false;
    std::vector<double> history;
};

LevelChoice choose_level(const ControlSet& phi, const std::vector<double>& source,
                         const std::vector<Branch>& branches,
                         const std::vector<LevelBasis>& decomp, std::size_t level,
                         double epsilon, bool stop_early,
                         std::vector<std::vector<std::vector<double>>>& uni_cache) {
    std::size_t K = 0;
    for (const auto& d : decomp) K = std::max(K, d.basis.size());
    LevelChoice choice;
    std::vector<double> err = source;
    uni_cache.assign(branches.size(), {});
    if (K == 0) {
        choice.history.push_back(mean_square(err));
        choice.met = choice.history.back() < epsilon;
        return choice;
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < branches.size(); ++b) {
            if (k >= decomp[b].basis.size()) continue;
            auto uni = phi.univariate(decomp[b].coefficient_functions[k], level);
            const auto rest = phi.rest(decomp[b].basis[k], level + 1);
            phi.subtract_term(err, branches[b].lead, uni, rest);
            uni_cache[b].push_back(std::move(uni));
        }
        const double mse = mean_square(err);
        choice.history.push_back(mse);
        if (mse < epsilon) {
            choice.M = k;
            choice.met = true;
            if (stop_early) return choice;
        }
    }
    if (!choice.met) choice.M = K - 1;
    return choice;
}

void check_spec(const TruncationSpec& spec) {
    if (!(spec.epsilon > 0.0)) throw DomainError("truncation epsilon must be > 0");
}

}  // namespace

// ---------------------------------------------------------------------------

ReducedPolynomial::ReducedPolynomial(Domain domain, std::vector<std::size_t> degrees,
                                     std::vector<std::size_t> retained,
                                     std::vector<NdArray> levels)
    : domain_(std::move(domain)),
      degrees_(std::move(degrees)),
      retained_(std::move(retained)),
      levels_(std::move(levels)) {
    const std::size_t n = degrees_.size();
    if (n == 0 || domain_.dims() != n) throw DimensionError("reduced: domain/degree mismatch");
    if (retained_.size() != n || levels_.size() != n) {
        throw DimensionError("reduced: need n retained counts and n level arrays");
    }
    if (retained_[n - 1] != degrees_[n - 1]) {
        throw DimensionError("reduced: last retained count must equal N_n");
    }
    std::vector<std::size_t> prefix;
    for (std::size_t j = 0; j < n; ++j) {
        if (degrees_[j] < 1) throw DomainError("reduced: degrees must be >= 1");
        if (retained_[j] > degrees_[j]) throw DomainError("reduced: M_j must not exceed N_j");
        std::vector<std::size_t> expect = prefix;
        if (j + 1 < n) expect.push_back(retained_[j] + 1);
        expect.push_back(degrees_[j] + 1);
        if (levels_[j].extents() != expect) {
            throw DimensionError("reduced: level " + std::to_string(j + 1) + " has wrong extents");
        }
        prefix.push_back(retained_[j] + 1);
    }
}

std::vector<NdArray> nodal_slices(const NdArray& coeffs) {
    if (coeffs.rank() < 2) throw DimensionError("nodal_slices: need at least 2 variables");
    const std::size_t m = coeffs.extent(0);
    const std::size_t R = coeffs.size() / m;
    const auto x = reference_nodes(m - 1);
    const NdArray T = cheb_poly_values(m - 1, x);  // [l, i]
    std::vector<std::size_t> rest_ext(coeffs.extents().begin() + 1, coeffs.extents().end());
    std::vector<NdArray> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> s(R, 0.0);
        for (std::size_t l = 0; l < m; ++l) {
            const double t = T[l * m + i];
            const double* row = coeffs.data().data() + l * R;
            for (std::size_t r = 0; r < R; ++r) s[r] += t * row[r];
        }
        out.emplace_back(rest_ext, std::move(s));
    }
    return out;
}

std::vector<NdArray> nodal_slices(const Interpolant& p) { return nodal_slices(p.coeffs()); }

LevelBasis greedy_orthonormal_level(std::span<const NdArray> slices, double rel_tol) {
    LevelBasis out;
    const std::size_t m = slices.size();
    if (m < 2) throw DomainError("greedy_orthonormal_level: need at least 2 slices");
    const auto& ext = slices.front().extents();
    for (const auto& s : slices) {
        if (s.extents() != ext) throw DimensionError("greedy_orthonormal_level: slice extents differ");
    }
    const std::size_t R = slices.front().size();
    const auto w = weight_tensor(ext);
    const auto C = nodal_to_coeff_matrix(m);

    // Norm of P over all variables from the nodal slices.
    auto total_norm2 = [&](const std::vector<std::vector<double>>& s) {
        std::vector<double> nodal(m);
        double acc = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t i = 0; i < m; ++i) nodal[i] = s[i][r];
            acc += w[r] * nodal_series_norm2(C, nodal);
        }
        return acc;
    };

    std::vector<std::vector<double>> residual(m);
    for (std::size_t i = 0; i < m; ++i) residual[i].assign(slices[i].data().begin(), slices[i].data().end());
    const double p_norm = std::sqrt(total_norm2(residual));
    if (p_norm == 0.0) return out;

    std::vector<std::vector<double>> basis;
    std::vector<bool> available(m, true);
    std::vector<double> cand(R), best_q(R), proj(m);

    while (true) {
        double best_score = -1.0;
        std::size_t best = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!available[i]) continue;
            cand.assign(slices[i].data().begin(), slices[i].data().end());
            // Classical Gram-Schmidt against every selected element, twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : basis) {
                    const double c = wdot(w, cand, q);
                    for (std::size_t r = 0; r < R; ++r) cand[r] -= c * q[r];
                }
            }
            const double norm = std::sqrt(wdot(w, cand, cand));
            if (!(norm >= rel_tol * p_norm)) {
                available[i] = false;  // already explained by the basis
                continue;
            }
            for (auto& v : cand) v /= norm;
            // ||R - <R,q> q||^2 = ||R||^2 - ||<R,q>||^2: maximise the latter.
            for (std::size_t k = 0; k < m; ++k) proj[k] = wdot(w, residual[k], cand);
            const double score = nodal_series_norm2(C, proj);
            if (score > best_score) {
                best_score = score;
                best = i;
                best_q = cand;
            }
        }
        if (best == m) break;

        available[best] = false;
        std::vector<double> a(m);
        for (std::size_t k = 0; k < m; ++k) {
            a[k] = wdot(w, std::span<const double>(slices[k].data()), best_q);
            const double c = wdot(w, residual[k], best_q);
            for (std::size_t r = 0; r < R; ++r) residual[k][r] -= c * best_q[r];
        }
        out.coefficient_functions.push_back(coeffs_1d(a));
        out.selected.push_back(best);
        out.basis.emplace_back(ext, best_q);
        basis.push_back(best_q);

        if (std::sqrt(std::max(0.0, total_norm2(residual))) < rel_tol * p_norm) break;
    }
    return out;
}

CompressResult compress_with_report(const Interpolant& p, const TruncationSpec& spec) {
    check_spec(spec);
    if (p.is_split()) throw DimensionError("compress: interpolant must not be split");
    const std::size_t n = p.dims();
    const auto& N = p.degrees();

    if (n == 1) {
        ReducedPolynomial q(p.domain(), N, N, {p.coeffs()});
        return {std::move(q), 0.0, {}, false};
    }

    const ControlSet phi(p, spec);
    const std::vector<double> source = phi.full(p.coeffs());

    std::vector<Branch> branches{{p.coeffs(), false, phi.lead_init()}};
    std::vector<std::size_t> retained;
    std::vector<NdArray> levels;
    std::vector<double> level_mse;
    bool floor_limited = false;

    for (std::size_t j = 0; j + 1 < n; ++j) {
        std::vector<LevelBasis> decomp(branches.size());
        for (std::size_t b = 0; b < branches.size(); ++b) {
            if (branches[b].empty) continue;
            const auto sl = nodal_slices(branches[b].poly);
            decomp[b] = greedy_orthonormal_level(sl, spec.basis_rel_tol);
        }

        std::vector<std::vector<std::vector<double>>> uni;
        const auto choice = choose_level(phi, source, branches, decomp, j, spec.epsilon, true, uni);
        if (!choice.met) {
            if (!spec.allow_roundoff_floor) {
                throw TruncationError("epsilon " + std::to_string(spec.epsilon) +
                                          " is below the achievable floor " +
                                          std::to_string(choice.history.back()),
                                      choice.history.back());
            }
            floor_limited = true;
        }
        const std::size_t M = choice.M;
        retained.push_back(M);
        level_mse.push_back(choice.history.empty() ? 0.0 : choice.history.back());

        // Level array [M_1+1 .. M_j+1, N_j+1], zero-padded where a branch ran
        // out of basis functions.
        std::vector<std::size_t> ext;
        for (auto r : retained) ext.push_back(r + 1);
        ext.push_back(N[j] + 1);
        NdArray A(ext);
        std::vector<Branch> next;
        next.reserve(branches.size() * (M + 1));
        std::vector<std::size_t> rest_ext(N.begin() + j + 1, N.end());
        for (auto& e : rest_ext) e += 1;

        for (std::size_t b = 0; b < branches.size(); ++b) {
            for (std::size_t k = 0; k <= M; ++k) {
                const bool have = k < decomp[b].basis.size();
                const std::size_t row = b * (M + 1) + k;
                if (have) {
                    const auto& c = decomp[b].coefficient_functions[k].coeffs;
                    std::copy(c.begin(), c.end(), A.data().begin() + row * (N[j] + 1));
                    next.push_back({decomp[b].basis[k], false,
                                    phi.combine(branches[b].lead, uni[b][k])});
                } else {
                    next.push_back({NdArray(rest_ext), true, {}});
                }
            }
        }
        levels.push_back(std::move(A));
        branches = std::move(next);
    }

    // Terminal univariate functions of the last variable.
    std::vector<std::size_t> ext;
    for (auto r : retained) ext.push_back(r + 1);
    ext.push_back(N[n - 1] + 1);
    NdArray terminal(ext);
    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (branches[b].empty) continue;
        const auto& d = branches[b].poly.data();
        std::copy(d.begin(), d.end(), terminal.data().begin() + b * (N[n - 1] + 1));
    }
    levels.push_back(std::move(terminal));
    retained.push_back(N[n - 1]);

    ReducedPolynomial q(p.domain(), N, std::move(retained), std::move(levels));
    const double mse = mean_squared_difference(phi.full(q), source);
    if (mse >= spec.epsilon) {
        if (!spec.allow_roundoff_floor) {
            throw TruncationError("reduced polynomial misses epsilon: achieved " + std::to_string(mse),
                                  mse);
        }
        floor_limited = true;
    }
    return {std::move(q), mse, std::move(level_mse), floor_limited};
}

ReducedPolynomial compress(const Interpolant& p, const TruncationSpec& spec) {
    return compress_with_report(p, spec).poly;
}

std::vector<LevelOneRow> level_one_profile(const Interpolant& p, const TruncationSpec& spec) {
    check_spec(spec);
    if (p.is_split()) throw DimensionError("level_one_profile: interpolant must not be split");
    if (p.dims() < 2) throw DimensionError("level_one_profile: need at least 2 variables");
    const ControlSet phi(p, spec);
    const auto source = phi.full(p.coeffs());
    std::vector<Branch> root{{p.coeffs(), false, phi.lead_init()}};
    std::vector<LevelBasis> decomp{greedy_orthonormal_level(nodal_slices(p.coeffs()), spec.basis_rel_tol)};
    std::vector<std::vector<std::vector<double>>> uni;
    const auto choice = choose_level(phi, source, root, decomp, 0, spec.epsilon, false, uni);

    const auto& N = p.degrees();
    std::uint64_t rest = 1;
    for (std::size_t j = 1; j < N.size(); ++j) rest *= N[j] + 1;
    std::vector<LevelOneRow> rows;
    for (std::size_t k = 0; k < decomp[0].basis.size(); ++k) {
        const std::uint64_t count = k + 1;
        rows.push_back({count, 8 * count * ((N[0] + 1) + rest), choice.history[k]});
    }
    return rows;
}

NdArray eval_reduced_grid(const ReducedPolynomial& q, const ProductGrid& grid) {
    if (grid.dims() != q.dims()) {
        throw DimensionError("eval_reduced_grid: grid dimension " + std::to_string(grid.dims()) +
                             " != " + std::to_string(q.dims()));
    }
    std::vector<std::vector<double>> ref(q.dims());
    for (std::size_t j = 0; j < q.dims(); ++j) {
        if (grid.axes[j].empty()) throw DimensionError("eval_reduced_grid: empty axis");
        for (double v : grid.axes[j]) ref[j].push_back(q.domain().to_reference(j, v));
    }
    return fold_levels(q, [&](std::size_t j, const NdArray& A) {
        return contract_last(A, cheb_poly_values(q.degrees()[j], ref[j]));
    });
}

double eval_point(const ReducedPolynomial& q, std::span<const double> point) {
    if (point.size() != q.dims()) throw DimensionError("eval_point: point dimension mismatch");
    ProductGrid g;
    for (double v : point) g.axes.push_back({v});
    return eval_reduced_grid(q, g)[0];
}

double fd_partial(const ReducedPolynomial& q, std::span<const double> point, std::size_t dim,
                  double h) {
    return fd_partial([&](std::span<const double> x) { return eval_point(q, x); }, q.domain(),
                      point, dim, h);
}

NdArray expand(const ReducedPolynomial& q) {
    return fold_levels(q, [](std::size_t, const NdArray& A) { return A; });
}

StorageReport storage_report(const ReducedPolynomial& q, std::span<const std::size_t> full_extents) {
    StorageReport r;
    r.full_bytes = 8 * static_cast<std::uint64_t>(product(full_extents));
    std::uint64_t numel = 0;
    for (const auto& A : q.levels()) numel += A.size();
    r.reduced_bytes = 8 * numel;
    r.savings_fraction = r.full_bytes == 0
                             ? 0.0
                             : 1.0 - static_cast<double>(r.reduced_bytes) /
                                         static_cast<double>(r.full_bytes);
    return r;
}

}  // namespace chebrb
