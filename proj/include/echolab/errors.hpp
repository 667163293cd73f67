#pragma once

#include <stdexcept>

namespace echolab {

/// Internal-consistency failure of a numerical routine (invariant drift,
/// step-size underflow, non-physical output).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fock-space truncation too small for the requested state.
class TruncationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace echolab
