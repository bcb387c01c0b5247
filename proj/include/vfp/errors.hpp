#pragma once

#include <stdexcept>
#include <string>

namespace vfp {

// User-facing configuration problems (bad key, out-of-range value, missing file).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical faults detected at run time (NaN, negativity beyond tolerance,
// CFL violation, particle escape, non-convergence).
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vfp
