#pragma once

#include <stdexcept>
#include <string>

namespace mb {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation hit (or came within the pole threshold of) a pole.
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical result could not be resolved at the requested precision.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mb
