#pragma once

#include <stdexcept>
#include <string>

namespace ssn {

// Bad or unreadable input data. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure failed (non-convergence, singular system).
// The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two profiles or vectors were built against different topic sets.
class DimensionMismatch : public std::invalid_argument {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs)
        : std::invalid_argument("incompatible lexicons: dimension " + std::to_string(lhs) + " vs " +
                                std::to_string(rhs)) {}
};

}  // namespace ssn
