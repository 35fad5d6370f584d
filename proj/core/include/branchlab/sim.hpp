#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "branchlab/instance.hpp"
#include "branchlab/scoring.hpp"
#include "branchlab/svb.hpp"
#include "branchlab/tree_size.hpp"

namespace branchlab {

/// Gain distributions of the random experiments (integers, l <= r):
/// B: two draws on [1, 1000], ordered; U: l in [1, 500], r in [501, 1000];
/// V: l in [1, 250], r in [251, 1000]; X: l in [1, 100], r in [101, 1000].
enum class DataType { Balanced, Unbalanced, VeryUnbalanced, ExtremelyUnbalanced };

char data_type_code(DataType dt) noexcept;
std::optional<DataType> parse_data_type(std::string_view code) noexcept;

/**
 * Seed of substream (data type, index, attempt) of a master seed, mixed with
 * splitmix64. Instance i of an experiment uses attempt 0; attempt k > 0 is its
 * k-th replacement when it had to be regenerated.
 */
std::uint64_t derive_seed(std::uint64_t master, DataType dt, std::uint64_t index, std::uint64_t attempt = 0);

/**
 * n random variables of type dt from std::mt19937_64 seeded with seed. Draws
 * use rejection sampling on the raw 64-bit output, so the result is the same
 * on every platform. The gap is a placeholder of 1 and there are no
 * multiplicities; callers rebuild the instance with their own.
 */
BranchingInstance generate_instance(DataType dt, std::size_t n, std::uint64_t seed);

struct SimOptions {
    SizeOptions size = {.state_cap = kDefaultStateCap,
                        .digit_budget = kDefaultDigitBudget,
                        .arithmetic = Arithmetic::Approx};
    RatioOptions ratio = {};
    RatioCache* cache = nullptr;
};

/**
 * Size of the tree the policy builds. With multiplicities, each node asks the
 * policy for a variable among those with uses left on its path, and states
 * (residual gap, remaining uses) are shared. Without them, gap-independent
 * policies keep one variable all the way down, giving a single-variable size;
 * gap-dependent ones (svts, hybrid) choose per residual gap on the integer
 * lattice. Throws Infeasible when a path runs out of variables.
 */
TreeSize simulate_policy_tree(const BranchingInstance& inst, double gap, const ScoringPolicy& policy,
                              const SimOptions& options = {});

/// Same tree with each node's choice made by select() on the remaining
/// candidates, with no precomputed rankings. Reference for the fast path.
TreeSize simulate_policy_tree_generic(const BranchingInstance& inst, double gap, const ScoringPolicy& policy,
                                      const SimOptions& options = {});

/// One named column of per-instance sizes. Columns with competes = false are
/// references (bounds, optima) and do not take part in the wins count.
struct Series {
    std::string name;
    std::vector<TreeSize> sizes;
    bool competes = true;
};

struct SeriesMetrics {
    std::string name;
    double geo_mean_log10 = 0.0;
    double shifted_geo_mean_10_log10 = 0.0;
    double shifted_geo_mean_100_log10 = 0.0;
    /// 100 * (geo / geo_reference - 1).
    double ts_percent = 0.0;
    std::size_t wins = 0;
};

/**
 * Geometric means (as log10, since sizes overflow doubles), shifted geometric
 * means, percent change against series[reference] and per-instance wins,
 * crediting every competing series that attains the minimum.
 */
std::vector<SeriesMetrics> aggregate_metrics(const std::vector<Series>& series, std::size_t reference);

/// exp(mean ln(s + shift)) - shift over doubles. Shift 0 is the plain mean.
double shifted_geometric_mean(const std::vector<double>& values, double shift);

struct ExperimentRow {
    DataType data_type;
    double gap;
    std::uint64_t instance_seed;
    std::string policy;
    TreeSize size;
};

struct ExperimentGroup {
    DataType data_type;
    double gap;
    std::string reference;
    std::vector<SeriesMetrics> metrics;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<ExperimentGroup> groups;
    /// Replaced instances and similar events, one line each.
    std::vector<std::string> notes;
};

struct MvbExperimentConfig {
    std::vector<DataType> data_types = {DataType::Balanced, DataType::Unbalanced, DataType::VeryUnbalanced,
                                        DataType::ExtremelyUnbalanced};
    std::size_t n = 100;
    double gap = 1e5;
    std::size_t instances = 100;
    std::vector<ScoringPolicy> policies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}};
    std::uint64_t seed = 1;
    bool exact = false;
    unsigned jobs = 1;
    std::size_t state_cap = kDefaultStateCap;
};

/// Series names of the reference columns of the MVB experiment.
inline constexpr std::string_view kLowerBoundSeries = "LB";
inline constexpr std::string_view kOptimumSeries = "optimal";

/**
 * For each instance: every policy's single-variable size, LB (the smallest
 * single-variable size) and the exact optimum from mvb_min_size(). Percent
 * changes are against the optimum.
 */
ExperimentReport run_mvb_experiment(const MvbExperimentConfig& cfg);

/// Gaps of the published general-variable runs for each data type.
std::vector<double> default_gvb_gaps(DataType dt);

struct GvbExperimentConfig {
    std::vector<DataType> data_types = {DataType::ExtremelyUnbalanced};
    std::size_t n = 100;
    /// Empty means default_gvb_gaps() of each data type.
    std::vector<double> gaps = {};
    std::size_t instances = 100;
    std::vector<ScoringPolicy> policies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}};
    /// Index into policies of the percent-change reference.
    std::size_t reference = 1;
    std::uint64_t seed = 1;
    bool exact = false;
    unsigned jobs = 1;
    std::size_t state_cap = kDefaultStateCap;
    /// Replacement attempts per instance before giving up.
    std::size_t max_attempts = 1000;
};

/**
 * Policy trees with every multiplicity 1. Instances whose left gains cannot
 * close the largest gap are replaced by the next attempt of their substream,
 * with a note.
 */
ExperimentReport run_gvb_experiment(const GvbExperimentConfig& cfg);

/// CSV: data_type,gap,instance_seed,policy,tree_size_mantissa,tree_size_exp10.
std::string report_csv(const ExperimentReport& report);
/// Metrics per (data type, gap) group plus notes, as JSON.
std::string report_summary_json(const ExperimentReport& report);

}  // namespace branchlab
