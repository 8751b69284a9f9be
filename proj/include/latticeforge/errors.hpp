#pragma once

#include <stdexcept>
#include <string>

namespace latticeforge {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad basis, bad parameters, inconsistent dimensions.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// An enumeration or search exceeded its point budget.
class CapacityError : public Error {
  public:
    using Error::Error;
};

// A matrix that must have full rank does not.
class RankError : public Error {
  public:
    using Error::Error;
};

// Value outside the domain of a formula (q outside (0,1), sigma^2 <= 0, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

}  // namespace latticeforge
