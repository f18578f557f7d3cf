#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

/// Violated caller-side contract (non-unit input, bad dimension request, ...).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input that is structurally unusable (zero column, empty support, ...).
class DegenerateInputError : public std::invalid_argument {
public:
    explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an equality/ball-constrained solve has an empty feasible set.
/// Carries the best residual that is achievable for the instance.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual(best_residual) {}
    double best_residual;
};

/// Exhaustive enumeration would exceed the configured combinatorial budget.
class BudgetExceededError : public std::runtime_error {
public:
    explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ssc
