#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "branchlab/instance.hpp"
#include "branchlab/svb.hpp"
#include "branchlab/tree_size.hpp"

namespace branchlab {

struct MvbSolution {
    TreeSize size;
    std::size_t root_choice = 0;
    /// Variable branched on at each residual gap 1..G, indexed by the gap in
    /// lattice units (scale * gap); entry 0 is unused.
    std::vector<std::uint32_t> choice_by_gap;
    /// Lattice scale: residual gaps are stored multiplied by this.
    std::int64_t scale = 1;
};

/**
 * Minimum tree size when any variable may be reused freely:
 * t(G) = 1 + min_i (t(G - l_i) + t(G - r_i)), t(G <= 0) = 1.
 *
 * Bottom-up over the integer gaps 0..G after rescaling rational data onto the
 * integers; ties go to the smallest index. Multiplicities, if present, are
 * ignored. Throws BudgetExceeded past options.state_cap gaps, DomainError for
 * data with no rational form.
 */
MvbSolution mvb_min_size(const BranchingInstance& inst, double gap, const SizeOptions& options = {});

/// Growth ratio of the MVB recurrence: min over variables of their SVB ratio.
double mvb_ratio(const BranchingInstance& inst, const RatioOptions& options = {});

/**
 * Smallest H such that for every integer gap in [H, max_gap] the variable of
 * minimum ratio is among the minimizers of the MVB recurrence. nullopt when
 * even max_gap fails. Needs integer gains and at least two variables.
 */
std::optional<std::int64_t> mvb_root_threshold(const BranchingInstance& inst, std::int64_t max_gap,
                                               const SizeOptions& options = {},
                                               const RatioOptions& ratio_options = {});

/// Default cap on the total multiplicity sum accepted by gvb_min_size().
inline constexpr std::uint32_t kDefaultMultiplicityCap = 24;

struct GvbOptions {
    SizeOptions size;
    std::uint32_t multiplicity_cap = kDefaultMultiplicityCap;
};

struct GvbSolution {
    TreeSize size;
    std::size_t states_visited = 0;
};

/**
 * Minimum tree size when variable i may appear at most m_i times on every
 * root-to-leaf path, by memoized recursion on (residual gap, remaining
 * multiplicities). Throws Infeasible when no tree closes the gap and
 * BudgetExceeded past the multiplicity or state caps.
 */
GvbSolution gvb_min_size(const BranchingInstance& inst, double gap, const GvbOptions& options = {});

/**
 * Covering-knapsack instance embedded as a general-variable instance: one
 * variable (C, C + w_i) per item with C = sum(w), a dummy (C, C), gap
 * N*C + W and all multiplicities 1. Its minimum tree has
 * 2^(N+2) - 1 - 2K nodes, K being the number of covers.
 * Throws InfeasibleKnapsack when sum(w) < W.
 */
BranchingInstance knapsack_to_gvb(std::span<const std::uint64_t> weights, std::uint64_t capacity);

/// Number of x in {0,1}^N with sum w_i x_i >= W, by enumeration (N <= 25).
std::uint64_t count_knapsack_covers(std::span<const std::uint64_t> weights, std::uint64_t capacity);

}  // namespace branchlab
