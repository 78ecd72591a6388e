#pragma once

#include <stdexcept>
#include <string>

namespace psd {

// Bad shapes, out-of-range parameters, non-finite input.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation is not defined for this kind of input (e.g. anisotropic
// precision for Lipschitz bounds, Hellinger mode on a full-rank model).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Unbounded rectangle handed to an operation that needs a bounded one.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Total model mass over the requested region is zero.
class EmptyMassError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A configured size cap (term count, leaf count) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A user-supplied oracle broke its contract (e.g. negative density value).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace psd
