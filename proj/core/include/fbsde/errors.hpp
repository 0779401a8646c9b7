#pragma once

#include <stdexcept>
#include <string>

namespace fbsde {

/// Raised when a solver or estimator hits a numeric failure (non-finite
/// state, singular regression, blown-up ODE). CLI maps this to exit code 1.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed experiment configuration. CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fbsde
