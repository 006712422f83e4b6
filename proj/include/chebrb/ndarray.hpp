#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace chebrb {

/// Dense n-dimensional array of doubles, row-major with the last axis
/// fastest. Holds interpolation values, coefficient tensors and
/// evaluation results.
///
/// A rank-0 array (no extents) holds a single scalar.
class NdArray {
public:
    NdArray() : data_(1, 0.0) {}

    /// Zero-filled array. Every extent must be >= 1.
    explicit NdArray(std::vector<std::size_t> extents);

    /// Takes ownership of `data`; its length must equal the product of extents.
    NdArray(std::vector<std::size_t> extents, std::vector<double> data);

    static NdArray matrix(std::size_t rows, std::size_t cols) {
        return NdArray({rows, cols});
    }

    std::size_t rank() const noexcept { return extents_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
    const std::vector<std::size_t>& extents() const noexcept { return extents_; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t flat) noexcept { return data_[flat]; }
    double operator[](std::size_t flat) const noexcept { return data_[flat]; }

    /// Multi-index access; throws DimensionError on rank or range mismatch.
    double& at(std::span<const std::size_t> index);
    double at(std::span<const std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index) {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }
    double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    /// Row-major flat offset of a multi-index (no bounds checks).
    std::size_t offset(std::span<const std::size_t> index) const noexcept;

    /// Same data, new extents with identical element count.
    NdArray reshaped(std::vector<std::size_t> extents) const;

    bool operator==(const NdArray& other) const = default;

private:
    std::vector<std::size_t> extents_;
    std::vector<double> data_;
};

std::size_t product(std::span<const std::size_t> extents) noexcept;

/// Rotates the leading axis to the back: D(j_1..j_m, i) = a(i, j_1..j_m).
/// Requires rank >= 2.
NdArray permute_cycle(const NdArray& a);

/// General axis permutation: result axis k is input axis order[k].
NdArray permute_axes(const NdArray& a, std::span<const std::size_t> order);

/// Leading-axis contraction with the shared axis moved to the back.
///
/// a has extents [s, n_1..n_k], b has extents [s, t]. The result has
/// extents [n_1..n_k, t] with C(j.., :) = b^T a(:, j..). Equivalent to a
/// matrix product followed by permute_cycle.
NdArray tensor_contract(const NdArray& a, const NdArray& b);

/// Batched contraction used by the reduced-basis evaluation.
///
/// a has extents [m_1..m_{k-1}, m_k, t], b has extents
/// [m_1..m_{k-1}, m_k, b_1..b_s] (s >= 0). For every batch index the
/// result slice is a(batch, :, :)^T * b(batch, :, ...), giving extents
/// [m_1..m_{k-1}, t, b_1..b_s].
NdArray tensor_contract_batched(const NdArray& a, const NdArray& b);

}  // namespace chebrb
