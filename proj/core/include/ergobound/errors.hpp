#pragma once

#include <stdexcept>
#include <string>

namespace ergobound {

/// Raised when an argument lies outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure (quadrature, series, simulation) fails.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A criterion whose hypotheses do not hold for the given model.
class InapplicableError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ergobound
