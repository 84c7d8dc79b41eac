#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dhj {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed the configured work budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
      : Error(what + ": requires " + std::to_string(required) + " units, budget is " +
              std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const { return required_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

/// Work budget used by exhaustive searches when the caller does not pass one.
/// Read once from DHJ_WORK_BUDGET; falls back to 10^8.
std::uint64_t default_work_budget();

/// Throws BudgetExceeded when `required` exceeds `budget`.
void check_budget(const std::string& what, std::uint64_t required, std::uint64_t budget);

}  // namespace dhj
