// errors.hpp: Exception types shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace ermea {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Steady state not unique: the kernel vector has (numerically) zero trace.
struct DegenerateKernelError : NumericalError {
    using NumericalError::NumericalError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ermea
