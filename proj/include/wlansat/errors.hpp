#pragma once

#include <stdexcept>
#include <string>

namespace wlansat {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter or input document violates its invariants.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// The conflict graph has more WLANs than full subset enumeration allows.
class StateSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

// An argument combination that callers must never produce.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Iterative or linear-algebra failure.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace wlansat
