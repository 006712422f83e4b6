#pragma once

#include "chebrb/interpolant.hpp"
#include "chebrb/models.hpp"
#include "chebrb/reduced_basis.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>

namespace chebrb {

/// Header: spot,strike,maturity_days,rate_annual,price
QuoteSet read_quotes(std::istream& in);
QuoteSet read_quotes(const std::filesystem::path& path);
void write_quotes(std::ostream& out, const QuoteSet& quotes);

/// Either product form, with header `dim,values...` and one row per
/// dimension (`j,v1,v2,...`), or explicit point rows under any header with
/// one column per dimension.
using EvalGrid = std::variant<ProductGrid, PointSet>;

EvalGrid read_grid(std::istream& in);
EvalGrid read_grid(const std::filesystem::path& path);
void write_product_grid(std::ostream& out, const ProductGrid& grid);

std::size_t grid_dims(const EvalGrid& g);
std::size_t grid_points(const EvalGrid& g);

/// Rows `x0,..,x{n-1},value`, product grids enumerated row-major.
void write_values(std::ostream& out, const EvalGrid& grid, std::span<const double> values);

}  // namespace chebrb
