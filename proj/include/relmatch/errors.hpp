#pragma once

#include <stdexcept>
#include <string>

namespace relmatch {

// Invalid configuration or argument values (CLI exit code 2).
class InputError : public std::invalid_argument {
  public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally valid request that falls outside the supported analytic
// classes, e.g. a production/trait pairing with no closed-form solution
// (CLI exit code 3).
class UnsupportedCaseError : public std::runtime_error {
  public:
    explicit UnsupportedCaseError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergence, infeasible dual, degenerate inputs
// discovered mid-computation.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relmatch
