// error.hpp: exception hierarchy shared by every steer module

#pragma once

#include <stdexcept>
#include <string>

namespace steer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: dimension mismatch, parameter out of range, malformed file.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotHermitianError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Something went wrong inside a computation that was given valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroProbabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace steer
