#include "chebrb/ndarray.hpp"

#include "chebrb/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace chebrb {

namespace {

std::string extents_str(const std::vector<std::size_t>& e) {
    std::string s = "[";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e[i]);
    }
    return s + "]";
}

void check_extents(const std::vector<std::size_t>& extents) {
    for (auto e : extents) {
        if (e == 0) throw DimensionError("NdArray: zero extent in " + extents_str(extents));
    }
}

}  // namespace

std::size_t product(std::span<const std::size_t> extents) noexcept {
    return std::accumulate(extents.begin(), extents.end(), std::size_t{1},
                           std::multiplies<>());
}

NdArray::NdArray(std::vector<std::size_t> extents)
    : extents_(std::move(extents)) {
    check_extents(extents_);
    data_.assign(product(extents_), 0.0);
}

NdArray::NdArray(std::vector<std::size_t> extents, std::vector<double> data)
    : extents_(std::move(extents)), data_(std::move(data)) {
    check_extents(extents_);
    if (product(extents_) != data_.size()) {
        throw DimensionError("NdArray: data length " + std::to_string(data_.size()) +
                             " does not match extents " + extents_str(extents_));
    }
}

std::size_t NdArray::offset(std::span<const std::size_t> index) const noexcept {
    std::size_t off = 0;
    for (std::size_t i = 0; i < extents_.size(); ++i) off = off * extents_[i] + index[i];
    return off;
}

double& NdArray::at(std::span<const std::size_t> index) {
    if (index.size() != extents_.size()) throw DimensionError("NdArray::at: rank mismatch");
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= extents_[i]) throw DimensionError("NdArray::at: index out of range");
    }
    return data_[offset(index)];
}

double NdArray::at(std::span<const std::size_t> index) const {
    return const_cast<NdArray*>(this)->at(index);
}

NdArray NdArray::reshaped(std::vector<std::size_t> extents) const {
    return NdArray(std::move(extents), data_);
}

NdArray permute_cycle(const NdArray& a) {
    if (a.rank() < 2) throw DimensionError("permute_cycle: need at least 2 axes");
    const std::size_t lead = a.extent(0);
    const std::size_t rest = a.size() / lead;

    std::vector<std::size_t> ext(a.extents().begin() + 1, a.extents().end());
    ext.push_back(lead);
    std::vector<double> out(a.size());
    const auto src = a.data();
    for (std::size_t i = 0; i < lead; ++i) {
        for (std::size_t j = 0; j < rest; ++j) out[j * lead + i] = src[i * rest + j];
    }
    return NdArray(std::move(ext), std::move(out));
}

NdArray permute_axes(const NdArray& a, std::span<const std::size_t> order) {
    const std::size_t r = a.rank();
    if (order.size() != r) throw DimensionError("permute_axes: order length != rank");
    std::vector<bool> seen(r, false);
    for (auto o : order) {
        if (o >= r || seen[o]) throw DimensionError("permute_axes: not a permutation");
        seen[o] = true;
    }
    std::vector<std::size_t> ext(r);
    for (std::size_t k = 0; k < r; ++k) ext[k] = a.extent(order[k]);

    // Source strides, reordered to the output axis order.
    std::vector<std::size_t> src_stride(r, 1);
    for (std::size_t k = r; k-- > 1;) src_stride[k - 1] = src_stride[k] * a.extent(k);
    std::vector<std::size_t> stride(r);
    for (std::size_t k = 0; k < r; ++k) stride[k] = src_stride[order[k]];

    NdArray out(ext);
    std::vector<std::size_t> idx(r, 0);
    const auto src = a.data();
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < r; ++k) off += idx[k] * stride[k];
        out[flat] = src[off];
        for (std::size_t k = r; k-- > 0;) {
            if (++idx[k] < ext[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

NdArray tensor_contract(const NdArray& a, const NdArray& b) {
    if (a.rank() < 1 || b.rank() != 2) {
        throw DimensionError("tensor_contract: need a of rank >= 1 and b of rank 2");
    }
    const std::size_t s = a.extent(0);
    if (b.extent(0) != s) {
        throw DimensionError("tensor_contract: leading extent mismatch (" + std::to_string(s) +
                             " vs " + std::to_string(b.extent(0)) + ")");
    }
    const std::size_t t = b.extent(1);
    const std::size_t rest = a.size() / s;

    std::vector<std::size_t> ext(a.extents().begin() + 1, a.extents().end());
    ext.push_back(t);
    std::vector<double> out(rest * t, 0.0);
    const auto ad = a.data();
    const auto bd = b.data();
    // C[j, k] = sum_i a[i, j] b[i, k]; i outermost keeps both reads contiguous.
    for (std::size_t i = 0; i < s; ++i) {
        const double* arow = ad.data() + i * rest;
        const double* brow = bd.data() + i * t;
        for (std::size_t j = 0; j < rest; ++j) {
            const double aij = arow[j];
            if (aij == 0.0) continue;
            double* crow = out.data() + j * t;
            for (std::size_t k = 0; k < t; ++k) crow[k] += aij * brow[k];
        }
    }
    return NdArray(std::move(ext), std::move(out));
}

NdArray tensor_contract_batched(const NdArray& a, const NdArray& b) {
    if (a.rank() < 2) throw DimensionError("tensor_contract_batched: a needs rank >= 2");
    const std::size_t k = a.rank() - 1;  // batch axes + contracted axis
    if (b.rank() < k) throw DimensionError("tensor_contract_batched: b rank too small");
    for (std::size_t i = 0; i < k; ++i) {
        if (a.extent(i) != b.extent(i)) {
            throw DimensionError("tensor_contract_batched: shared axis " + std::to_string(i) +
                                 " mismatch (" + std::to_string(a.extent(i)) + " vs " +
                                 std::to_string(b.extent(i)) + ")");
        }
    }
    const std::size_t m = a.extent(k - 1);
    const std::size_t t = a.extent(k);
    const std::size_t batches = product(std::span(a.extents()).first(k - 1));
    const std::size_t tail = product(std::span(b.extents()).subspan(k));

    std::vector<std::size_t> ext(a.extents().begin(), a.extents().begin() + (k - 1));
    ext.push_back(t);
    ext.insert(ext.end(), b.extents().begin() + k, b.extents().end());

    std::vector<double> out(batches * t * tail, 0.0);
    const auto ad = a.data();
    const auto bd = b.data();
    for (std::size_t p = 0; p < batches; ++p) {
        const double* ab = ad.data() + p * m * t;
        const double* bb = bd.data() + p * m * tail;
        double* cb = out.data() + p * t * tail;
        for (std::size_t i = 0; i < m; ++i) {
            const double* brow = bb + i * tail;
            for (std::size_t r = 0; r < t; ++r) {
                const double air = ab[i * t + r];
                if (air == 0.0) continue;
                double* crow = cb + r * tail;
                for (std::size_t c = 0; c < tail; ++c) crow[c] += air * brow[c];
            }
        }
    }
    return NdArray(std::move(ext), std::move(out));
}

}  // namespace chebrb
