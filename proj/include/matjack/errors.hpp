#pragma once

#include <stdexcept>
#include <string>

namespace matjack {

/// Invalid argument supplied to an algorithm or generator.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed file contents (bad magic, truncation, unparsable cell, ...).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical procedure lost positivity / encountered a breakdown.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A replicate quantity is ill-defined (e.g. singular-value tie at the
/// requested projector index). Carries the offending replicate index.
struct DegeneracyError : NumericalError {
    DegeneracyError(const std::string& what, int replicate)
        : NumericalError(what), replicate_index(replicate) {}
    int replicate_index;
};

}  // namespace matjack
