#pragma once

#include <stdexcept>
#include <string>

namespace hicomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or configuration invariant was violated by the caller.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A run failed while executing (instability, lost support, solver breakdown).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace hicomp
