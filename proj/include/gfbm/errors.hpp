#pragma once

#include <stdexcept>
#include <string>

namespace gfbm {

// Invalid parameters or inputs; the CLI maps it to exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Quadrature, factorization or solver failure; the CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gfbm
