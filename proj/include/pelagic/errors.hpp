#pragma once

#include <stdexcept>
#include <string>

namespace pelagic {

// Raised for malformed config files, CSV schema problems and unknown keys.
// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a planning problem has no feasible solution (e.g. the UAV
// speed envelope cannot produce any admissible trajectory). CLI maps this
// to exit code 1; sweeps record it in-row and continue.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pelagic
