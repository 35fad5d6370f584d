#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "branchlab/gains.hpp"
#include "branchlab/svb.hpp"
#include "branchlab/tree_size.hpp"

namespace branchlab {

double score_linear(const VariableGains& v, double mu);
double score_product(const VariableGains& v, double eps);

/// a.l >= b.l and a.r >= b.r with at least one strict.
bool dominates(const VariableGains& a, const VariableGains& b) noexcept;

/// Indices (ascending) of the candidates no other candidate dominates.
std::vector<std::size_t> filter_dominated(std::span<const VariableGains> candidates);

/// Tolerance on |p_2(phi_1)| below which two ratios are reported equivalent.
inline constexpr double kRatioCompareTolerance = 1e-12;

/**
 * Orders phi_2 = ratio(v2) against phi1 without computing phi_2: p_2 is
 * increasing with its root at phi_2, so p_2(phi1) > 0 means phi_2 < phi1.
 * Returns less when phi_2 < phi1.
 */
std::weak_ordering ratio_compare(double phi1, const VariableGains& v2);

/// Thread-safe memo of svb_ratio() keyed by the gains.
class RatioCache {
public:
    explicit RatioCache(RatioOptions options = {}) : options_(options) {}

    double phi(const VariableGains& v);
    std::size_t size() const;
    const RatioOptions& options() const noexcept { return options_; }

private:
    RatioOptions options_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<double, double>, double> phis_;
};

/**
 * Candidates at one node. gap is +inf when no bound is known. multiplicities,
 * when non-empty, are the remaining per-path uses aligned with candidates;
 * only the longest-path height estimate reads them.
 */
struct SelectionContext {
    double gap = std::numeric_limits<double>::infinity();
    std::span<const VariableGains> candidates;
    std::span<const std::uint32_t> multiplicities = {};
    RatioOptions ratio = {};
    RatioCache* cache = nullptr;
};

inline constexpr double kDefaultLinearMu = 1.0 / 6.0;
inline constexpr double kDefaultProductEps = 1e-6;
inline constexpr std::uint32_t kDefaultSvtsDepth = 100;
inline constexpr std::uint32_t kDefaultHybridHeight = 10;

/// How select_hybrid() guesses the height a node would have under ratio.
enum class HeightEstimate {
    /// ceil(G / r*) for the ratio choice r*: the shallowest leaf.
    MinDepth,
    /// ceil(G / l*) for the ratio choice l*: the height of its single-variable
    /// tree, as if it could be reused all the way down.
    SingleVariable,
    /// Length of the all-left path of the ratio tree, consuming candidates in
    /// ratio order up to their multiplicities (ceil(G / l*) when unlimited).
    LongestPath,
    /// Longest path any tree below could have: candidates taken by
    /// increasing left gain up to their multiplicities.
    WorstCasePath,
};

std::string_view height_estimate_name(HeightEstimate e) noexcept;
std::optional<HeightEstimate> parse_height_estimate(std::string_view name) noexcept;

struct LinearPolicy {
    double mu = kDefaultLinearMu;
};
struct ProductPolicy {
    double eps = kDefaultProductEps;
};
struct RatioPolicy {};
struct SvtsPolicy {
    std::uint32_t depth_cap = kDefaultSvtsDepth;
};
struct HybridPolicy {
    std::uint32_t height = kDefaultHybridHeight;
    HeightEstimate estimate = HeightEstimate::LongestPath;
};

using ScoringPolicy = std::variant<LinearPolicy, ProductPolicy, RatioPolicy, SvtsPolicy, HybridPolicy>;

/// "linear:0.5", "product", "ratio", "svts:100", "hybrid:10", ...
std::string policy_name(const ScoringPolicy& policy);

/**
 * Accepts linear[:MU], product[:EPS], ratio, svts[:D], hybrid[:H] and
 * hybrid[:H]:ESTIMATE with ESTIMATE one of min-depth, single-variable,
 * longest-path or worst-case-path. nullopt on unknown names or out-of-range
 * parameters.
 */
std::optional<ScoringPolicy> parse_policy(std::string_view text);

/// Argmax selections; ties go to the smallest index.
std::size_t select_linear(const SelectionContext& ctx, double mu = kDefaultLinearMu);
std::size_t select_product(const SelectionContext& ctx, double eps = kDefaultProductEps);

/**
 * Minimum-ratio candidate. Dominated candidates are dropped, phi* starts at
 * the best product-scored survivor and is only recomputed when ratio_compare
 * proves a survivor strictly better. Ties go to the smallest index.
 */
std::size_t select_ratio(const SelectionContext& ctx);

/**
 * Minimum single-variable tree size at the node's gap. Sizes come from the
 * closed form when the shallowest leaf depth ceil(G / r) is at most D, and
 * otherwise from t(r D) extrapolated by phi^(G - r D). An infinite gap
 * defers to select_ratio().
 */
std::size_t select_svts(const SelectionContext& ctx, std::uint32_t depth_cap = kDefaultSvtsDepth);

/// Product when the estimated ratio height is at most h, ratio otherwise.
/// h = 0 is select_ratio().
std::size_t select_hybrid(const SelectionContext& ctx, std::uint32_t height = kDefaultHybridHeight,
                          HeightEstimate estimate = HeightEstimate::LongestPath);

/// Height estimate used by select_hybrid(); +inf when the gap is infinite or
/// the candidates cannot close it.
double estimate_ratio_height(const SelectionContext& ctx, HeightEstimate estimate);

std::size_t select(const SelectionContext& ctx, const ScoringPolicy& policy);

/**
 * Right gain r with ratio(l, r) = phi: r = -ln(1 - phi^-l) / ln(phi).
 * Symmetric in the gains, so it also returns l given r. Throws DomainError
 * unless phi > 1 and l > 0.
 */
double iso_score_gain(double l, double phi);

/// Right gain giving (l, r) the same linear / product score as anchor.
double iso_linear_gain(double l, const VariableGains& anchor, double mu = kDefaultLinearMu);
double iso_product_gain(double l, const VariableGains& anchor);

}  // namespace branchlab
