#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symon {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (dimension or modulus mismatch,
// composite modulus where a prime is required, l = 2 for set construction...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(long double estimate, std::uint64_t budget)
      : Error("enumeration budget exceeded: estimated " + std::to_string(estimate) +
              " candidate matrices, budget " + std::to_string(budget)),
        estimate_(estimate),
        budget_(budget) {}

  long double estimate() const noexcept { return estimate_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  long double estimate_;
  std::uint64_t budget_;
};

// Internal consistency failure, e.g. fewer matrices without eigenvalue 1 than
// the lower bound guarantees.
class InsufficientMatrices : public Error {
 public:
  using Error::Error;
};

}  // namespace symon
