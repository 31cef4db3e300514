#pragma once

#include <stdexcept>
#include <string>

namespace surfpde {

// Bad arguments, malformed input files, violated preconditions.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, solver non-convergence, blow-up during time stepping.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace surfpde
