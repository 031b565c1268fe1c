#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

// Violated operation precondition (bad exponent range, mu > H^2, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Point outside the set an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Kernel evaluated at coincident points.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid experiment or grid configuration; maps to CLI exit status 2.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver breakdown, non-convergence or a violated numerical contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardy
