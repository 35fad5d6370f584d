#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace branchlab {

enum class ErrorKind {
    NonPositiveGain,
    NonFiniteGain,
    InvalidInstance,
    BudgetExceeded,
    NoConvergence,
    Infeasible,
    InfeasibleKnapsack,
    DomainError,
    ParseError,
};

/// Stable machine-readable name, e.g. "BudgetExceeded".
std::string_view error_kind_name(ErrorKind kind) noexcept;

/**
 * The single exception type thrown by the library. Callers branch on kind();
 * the message is for humans.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace branchlab
