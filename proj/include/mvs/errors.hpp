#pragma once

#include <stdexcept>
#include <string>

namespace mvs {

/// Invalid parameters or configuration (bad p, s, rho, unknown keys, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Domain geometry does not satisfy a construction's requirements.
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical invariant (monotonicity, bracketing, ...) was violated at run time.
/// Signals an operator or quadrature bug rather than bad input.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mvs
