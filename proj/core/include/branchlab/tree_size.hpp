#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include <gmpxx.h>

namespace branchlab {

using BigInt = mpz_class;

/// Exact sizes wider than this many decimal digits are demoted to Approx.
inline constexpr std::size_t kDefaultDigitBudget = 10000;

/// Relative tolerance used whenever an Approx size takes part in a comparison.
inline constexpr double kSizeRelTolerance = 1e-12;

/**
 * Number of nodes of a branch-and-bound tree.
 *
 * Either an exact arbitrary-precision integer, an approximate magnitude
 * mantissa * 10^exp10 with mantissa in [1, 10), or +infinity (a gap that can
 * never be closed). Exact sizes produced by join() are always odd: every
 * inner node has two children, so size = 2 * leaves - 1.
 *
 * Exact values are compared exactly; as soon as an Approx value is involved
 * two sizes are equivalent when they agree to kSizeRelTolerance.
 */
class TreeSize {
public:
    struct Approx {
        double mantissa = 1.0;
        std::int64_t exp10 = 0;
    };

    /// A single leaf.
    TreeSize() : value_(BigInt(1)) {}

    static TreeSize exact(BigInt value, std::size_t digit_budget = kDefaultDigitBudget);
    static TreeSize exact(unsigned long value) { return exact(BigInt(value)); }
    static TreeSize approx(double mantissa, std::int64_t exp10);
    static TreeSize from_log10(double log10_value);
    static TreeSize infinite() { return TreeSize(Infinity{}); }

    /// 1 + left + right, the size of a tree whose root has the two given subtrees.
    static TreeSize join(const TreeSize& left, const TreeSize& right,
                         std::size_t digit_budget = kDefaultDigitBudget);

    /// this * base^exponent; the result is always Approx (or infinite).
    TreeSize times_power(double base, double exponent) const;

    bool is_exact() const noexcept { return std::holds_alternative<BigInt>(value_); }
    bool is_approx() const noexcept { return std::holds_alternative<Approx>(value_); }
    bool is_infinite() const noexcept { return std::holds_alternative<Infinity>(value_); }
    bool is_finite() const noexcept { return !is_infinite(); }

    /// Throws DomainError unless is_exact().
    const BigInt& exact_value() const;

    /// Normalized magnitude of any finite size (exact values are rounded).
    Approx magnitude() const;

    /// log10 of the size; +inf for an infinite size.
    double log10() const;

    /// Decimal digits for exact values, "m.mmmmmmmmmmmme+N" for Approx, "inf".
    std::string to_string() const;

    friend bool operator==(const TreeSize& a, const TreeSize& b);
    friend std::partial_ordering operator<=>(const TreeSize& a, const TreeSize& b);

private:
    struct Infinity {};

    explicit TreeSize(std::variant<BigInt, Approx, Infinity> v) : value_(std::move(v)) {}

    std::variant<BigInt, Approx, Infinity> value_;
};

}  // namespace branchlab
