#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace carma {

/// Numerical failure (solver breakdown, quadrature non-convergence, ...).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation at (or too close to) a pole of a rational function.
class singularity_error : public numerical_error {
public:
    singularity_error(const std::string& msg, std::complex<double> where)
        : numerical_error(msg), point(where) {}
    std::complex<double> point;
};

/// Requested operation has no implementation for the given model family.
class unsupported_error : public std::logic_error {
public:
    explicit unsupported_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace carma
