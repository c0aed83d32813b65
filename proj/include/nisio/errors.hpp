#pragma once

#include <stdexcept>
#include <string>

namespace nisio {

/// Malformed argument to an operation (non-finite values, bad sizes).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Inconsistent setup: bad family, unknown config key, unsupported grid.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation left the regime where its discretization is meaningful.
class NumericalDegeneracy : public std::runtime_error {
public:
    explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nisio
