// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_ERRORS_HPP
#define COAXRES_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coaxres {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad inputs: invalid parameter values, malformed files, bad configuration.
class ValidationError : public Error {
public:
  using Error::Error;
};

// File system / parsing failures.
class IoError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Numerical failures: singularities, overflow, non-convergence.
class NumericalError : public Error {
public:
  using Error::Error;
};

class SingularityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// A fit window that does not contain a resonance dip.
class NoResonanceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// A global calibration that cannot bracket or converge.
class CalibrationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace coaxres

#endif  // COAXRES_ERRORS_HPP
