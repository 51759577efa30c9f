#pragma once

#include <stdexcept>

namespace simwt {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched shapes or feature schemas between inputs.
struct DimensionError : Error {
    using Error::Error;
};

// Only one class present among the positively weighted rows of a
// classification problem.
struct SingleClassError : Error {
    using Error::Error;
};

// Rank-deficient or otherwise numerically unsolvable system. We fail loudly
// instead of falling back to a pseudo-inverse.
struct NumericalError : Error {
    using Error::Error;
};

// Invalid argument values: empty inputs, negative weights, out-of-range
// parameters.
struct ValueError : Error {
    using Error::Error;
};

// Malformed or inconsistent input data (CSV schema violations, unknown
// subgroup labels). Messages carry the offending location.
struct DataError : Error {
    using Error::Error;
};

}  // namespace simwt
