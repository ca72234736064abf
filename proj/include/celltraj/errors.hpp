#pragma once

#include <stdexcept>
#include <string>

namespace celltraj {

// Error taxonomy maps onto CLI exit codes: input 2, convergence 3, config 4.

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations(iterations), residual(residual) {}

    int iterations;
    double residual;
};

}  // namespace celltraj
