// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhjb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid problem/solver parameters (non-integer 1/h, h >= 1/lambda, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unknown builtin problem name.
class RegistryError : public Error {
public:
    using Error::Error;
};

/// Triangulation cannot be built for the requested (domain, k).
class MeshError : public Error {
public:
    using Error::Error;
};

/// Mismatched GridFunction / PolicyField shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Oracle refused an instance above its enumeration budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// A point fell outside omega_k beyond the snap tolerance.
class OutOfDomainError : public Error {
public:
    OutOfDomainError(const std::string& what, std::size_t axis, double coordinate)
        : Error(what), axis_(axis), coordinate_(coordinate) {}

    std::size_t axis() const noexcept { return axis_; }
    double coordinate() const noexcept { return coordinate_; }

private:
    std::size_t axis_;
    double coordinate_;
};

}  // namespace mhjb
