#pragma once

#include "chebrb/interpolant.hpp"
#include "chebrb/models.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chebrb::cli {

struct Variable {
    std::string name;
    Bounds bounds;
    double default_value;
};

/// A pricing model seen as a function of its full variable vector, strike 1.
struct ModelSpec {
    std::string name;
    std::vector<Variable> variables;
    bool stochastic = false;
    double (*price)(std::span<const double> values, const McConfig& cfg);

    std::size_t index_of(std::string_view var) const;
};

const ModelSpec& find_model(std::string_view name);

/// Varied variables plus pinned values for the rest of a model.
struct Layout {
    const ModelSpec* model = nullptr;
    std::vector<std::size_t> varied;   // indices into model->variables
    std::vector<double> base;          // full vector with pins applied

    std::vector<std::string> names() const;
    Domain default_domain() const;
    /// Full model vector with the varied coordinates replaced by `point`.
    std::vector<double> full(std::span<const double> point) const;
    std::map<std::string, double> pinned() const;
};

/// `vars`: comma list of variable names (empty = all). `sets`: name=value.
Layout make_layout(std::string_view model, const std::string& vars,
                   const std::vector<std::string>& sets);

}  // namespace chebrb::cli
