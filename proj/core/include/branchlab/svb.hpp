#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "branchlab/gains.hpp"
#include "branchlab/tree_size.hpp"

namespace branchlab {

/// Default cap on dynamic-programming states (and closed-form update steps).
inline constexpr std::size_t kDefaultStateCap = 10'000'000;

enum class Arithmetic {
    Exact,   ///< big integers, demoted to Approx past the digit budget
    Approx,  ///< log-domain doubles throughout
};

struct SizeOptions {
    std::size_t state_cap = kDefaultStateCap;
    std::size_t digit_budget = kDefaultDigitBudget;
    Arithmetic arithmetic = Arithmetic::Exact;
};

/**
 * Size t(G) of the tree that closes gap G branching on v only:
 * t(G) = 1 for G <= 0, else 1 + t(G - l) + t(G - r).
 *
 * Rational data is rescaled onto the integers and solved bottom-up; other
 * real gains are memoized on the lattice G - a*l - b*r keyed by (a, b).
 * Throws BudgetExceeded past options.state_cap states.
 */
TreeSize svb_size_recurrence(const VariableGains& v, double gap, const SizeOptions& options = {});

/// t(0), t(1), ..., t(max_gap) for integer gains in one bottom-up pass.
std::vector<TreeSize> svb_size_recurrence_series(const VariableGains& v, std::int64_t max_gap,
                                                 const SizeOptions& options = {});

/**
 * Same quantity through the leaf-counting formula
 * t(G) = 1 + 2 * sum_{k=1}^{ceil(G/r)} C(k + ceil((G - (k-1) r) / l) - 1, k).
 * Binomials are exact; consecutive terms are reached by exact small-factor
 * updates. Ceilings use exact integer arithmetic whenever the data is rational.
 */
TreeSize svb_size_closed_form(const VariableGains& v, double gap, const SizeOptions& options = {});

enum class RatioMethod { FixedPoint, Bisection, Newton, Laguerre, Direct };

std::string_view ratio_method_name(RatioMethod m) noexcept;
std::optional<RatioMethod> parse_ratio_method(std::string_view name) noexcept;

/// Laguerre when r/l <= 100, the fixed-point iteration otherwise.
RatioMethod default_ratio_method(const VariableGains& v) noexcept;

struct RatioOptions {
    std::optional<RatioMethod> method;  ///< unset: default_ratio_method()
    double tol = 1e-12;                 ///< bound on the relative residual
    int max_iterations = 200;
    double direct_gap_factor = 50.0;    ///< direct method starts at F = factor * r
};

struct RatioResult {
    double phi = 1.0;
    RatioMethod method = RatioMethod::Laguerre;
    int iterations = 0;
    double residual = 0.0;  ///< |p(phi)| / max(1, phi p'(phi)), about phi's relative error
};

/**
 * Asymptotic growth ratio phi of v: the unique root > 1 of
 * x^r - x^(r-l) - 1, bracketed by 2^(1/r) <= phi <= 2^(1/l).
 * l == r is answered analytically as 2^(1/l).
 * Throws NoConvergence when the method misses tol within its iteration cap.
 */
RatioResult svb_ratio(const VariableGains& v, const RatioOptions& options = {});

/// phi^(G - F) * t(F), with t(F) from the closed form. Requires 0 < F <= G.
TreeSize svb_size_approx(const VariableGains& v, double gap, double base_gap,
                         const RatioOptions& options = {});

}  // namespace branchlab
