#pragma once

#include <stdexcept>
#include <string>

namespace chebrb {

/// Shape or rank mismatch between arrays, grids or axes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the admissible domain (bounds, degrees, parameters).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Failure raised while running a pricing oracle or simulation.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested truncation tolerance cannot be met by any retained basis.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double floor)
        : std::runtime_error(what), floor_(floor) {}

    double floor() const noexcept { return floor_; }

private:
    double floor_;
};

/// Malformed input file (container or CSV).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chebrb
