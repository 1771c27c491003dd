#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hbrd {

/// Invalid argument: unknown axis, overlapping sets, shape or alphabet mismatch.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A structural hypothesis (Markov chain, determinism) required by a special case does not hold.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(std::string check, const std::string& what)
        : std::runtime_error(what), check_(std::move(check)) {}

    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

/// A computation would exceed its configured size budget.
class BudgetError : public std::runtime_error {
public:
    BudgetError(double required, double budget, const std::string& what)
        : std::runtime_error(what), required_(required), budget_(budget) {}

    double required() const noexcept { return required_; }
    double budget() const noexcept { return budget_; }

private:
    double required_;
    double budget_;
};

}  // namespace hbrd
