#pragma once

#include "chebrb/interpolant.hpp"
#include "chebrb/reduced_basis.hpp"

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace chebrb {

/// Binary polynomial file, little-endian:
///   "CHRB" | u32 version = 1 | u8 kind | u8 n
///   n x (u32 degree, f64 min, f64 max)
///   kind 1 only: n x u32 retained [M_1 .. M_{n-1}, N_n]
///   payload of f64, row-major:
///     kind 0: the coefficient tensor
///     kind 1: level arrays in level order
///     kind 2: u8 axis, then N_axis + 1 slice tensors
enum class ContainerKind : std::uint8_t { full = 0, reduced = 1, split = 2 };

using Polynomial = std::variant<Interpolant, ReducedPolynomial>;

ContainerKind kind_of(const Polynomial& p);

std::vector<std::uint8_t> serialize(const Polynomial& p);
Polynomial parse_container(const std::vector<std::uint8_t>& bytes);

void write_container(const std::filesystem::path& path, const Polynomial& p);
Polynomial read_container(const std::filesystem::path& path);

/// Payload size in bytes a kind-0 file of these degrees would need.
std::uint64_t full_tensor_bytes(const std::vector<std::size_t>& degrees);

}  // namespace chebrb
