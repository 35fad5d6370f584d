#pragma once

// Value policies shared by the dynamic programs: exact TreeSize arithmetic or
// natural-log doubles. Both expose leaf(), infinite(), join(), compare() and
// finish() so one DP body serves both modes.

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>

#include "branchlab/svb.hpp"
#include "branchlab/tree_size.hpp"

namespace branchlab::detail {

struct ExactArith {
    using Value = TreeSize;

    std::size_t digit_budget = kDefaultDigitBudget;

    Value leaf() const { return TreeSize(); }
    Value infinite() const { return TreeSize::infinite(); }
    Value join(const Value& a, const Value& b) const { return TreeSize::join(a, b, digit_budget); }
    bool is_infinite(const Value& a) const { return a.is_infinite(); }
    // Compares left + right sums; the shared "+1" never changes an ordering.
    std::partial_ordering compare(const Value& a, const Value& b) const { return a <=> b; }
    TreeSize finish(const Value& a) const { return a; }
};

struct LogArith {
    using Value = double;  // ln of the size

    static constexpr double kTieTolerance = kSizeRelTolerance;

    Value leaf() const { return 0.0; }
    Value infinite() const { return std::numeric_limits<double>::infinity(); }
    Value join(Value a, Value b) const {
        if (std::isinf(a) || std::isinf(b)) return infinite();
        const double hi = std::max(a, b);
        const double lo = std::min(a, b);
        return hi + std::log1p(std::exp(lo - hi) + std::exp(-hi));
    }
    bool is_infinite(Value a) const { return std::isinf(a); }
    std::partial_ordering compare(Value a, Value b) const {
        if (std::isinf(a) && std::isinf(b)) return std::partial_ordering::equivalent;
        if (std::fabs(a - b) <= kTieTolerance) return std::partial_ordering::equivalent;
        return a < b ? std::partial_ordering::less : std::partial_ordering::greater;
    }
    TreeSize finish(Value a) const {
        if (std::isinf(a)) return TreeSize::infinite();
        return TreeSize::from_log10(a / std::log(10.0));
    }
};

/// ln of the sum of two log-domain values, used for sibling sums in the MVB DP.
inline double log_add(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace branchlab::detail
