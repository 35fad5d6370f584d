#include "branchlab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "branchlab/error.hpp"
#include "branchlab/multivar.hpp"
#include "count_arith.hpp"
#include "scaled_instance.hpp"

namespace branchlab {

namespace {

using detail::ScaledInstance;

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on [lo, hi] from the raw engine output; rejects the low
// 2^64 mod range values so every residue is equally likely.
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t x = rng();
    while (x < threshold) x = rng();
    return lo + static_cast<std::int64_t>(x % range);
}

template <class F>
auto with_arith(const SizeOptions& options, F&& f) {
    if (options.arithmetic == Arithmetic::Approx) return f(detail::LogArith{});
    return f(detail::ExactArith{options.digit_budget});
}

double phi_of(const SimOptions& options, const VariableGains& v) {
    return options.cache ? options.cache->phi(v) : svb_ratio(v, options.ratio).phi;
}

// Candidate indices in decreasing preference, ties by index.
std::vector<std::size_t> ranking(std::size_t n, const std::function<double(std::size_t)>& key) {
    std::vector<double> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = key(i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return order;
}

std::vector<std::size_t> ratio_ranking(const BranchingInstance& inst, const SimOptions& options) {
    return ranking(inst.size(), [&](std::size_t i) { return phi_of(options, inst.variables()[i]); });
}

std::vector<std::size_t> product_ranking(const BranchingInstance& inst, double eps) {
    return ranking(inst.size(), [&](std::size_t i) { return -score_product(inst.variables()[i], eps); });
}

std::vector<std::size_t> linear_ranking(const BranchingInstance& inst, double mu) {
    return ranking(inst.size(), [&](std::size_t i) { return -score_linear(inst.variables()[i], mu); });
}

std::size_t first_available(const std::vector<std::size_t>& order, const std::string& mults) {
    for (const std::size_t i : order) {
        if (mults[i] != 0) return i;
    }
    return kNone;
}

using Chooser = std::function<std::size_t(std::int64_t gap, const std::string& mults)>;

// Policy tree over (residual gap, remaining uses), memoized. Remaining uses
// are one byte per variable.
template <class Arith>
class PolicyTree {
public:
    using Value = typename Arith::Value;

    PolicyTree(const ScaledInstance& s, const Arith& arith, const Chooser& choose, std::size_t state_cap)
        : s_(s), arith_(arith), choose_(choose), state_cap_(state_cap) {}

    Value count(std::int64_t gap, std::string& mults) {
        if (gap <= 0) return arith_.leaf();
        std::string key(sizeof gap, '\0');
        std::memcpy(key.data(), &gap, sizeof gap);
        key += mults;
        if (const auto it = memo_.find(key); it != memo_.end()) return it->second;

        Value value = arith_.infinite();
        const std::size_t i = choose_(gap, mults);
        if (i != kNone) {
            --mults[i];
            Value left = count(gap - s_.left[i], mults);
            Value right = arith_.is_infinite(left) ? arith_.infinite() : count(gap - s_.right[i], mults);
            ++mults[i];
            value = arith_.join(left, right);
        }
        detail::check_states(memo_.size() + 1, state_cap_);
        memo_.emplace(std::move(key), value);
        return value;
    }

private:
    const ScaledInstance& s_;
    Arith arith_;
    const Chooser& choose_;
    std::size_t state_cap_;
    std::unordered_map<std::string, Value> memo_;
};

TreeSize run_policy_tree(const BranchingInstance& inst, double gap, const Chooser& choose,
                         const SimOptions& options) {
    const ScaledInstance s = detail::scale_to_integers(inst, gap);
    std::string mults;
    for (const auto m : *inst.multiplicities()) mults.push_back(static_cast<char>(std::min<std::uint32_t>(m, 255)));
    const TreeSize size = with_arith(options.size, [&](const auto& arith) {
        PolicyTree tree(s, arith, choose, options.size.state_cap);
        return arith.finish(tree.count(s.gap, mults));
    });
    if (size.is_infinite()) {
        throw Error(ErrorKind::Infeasible, "a path of the policy tree runs out of variables");
    }
    return size;
}

// Multiple-variable mode with a gap-dependent choice: bottom-up over the
// lattice gaps, choose(g) naming the variable branched on at residual g.
TreeSize run_gap_dp(const BranchingInstance& inst, double gap,
                    const std::function<std::size_t(std::int64_t, double)>& choose, const SimOptions& options) {
    const ScaledInstance s = detail::scale_to_integers(inst, gap);
    detail::check_states(static_cast<std::size_t>(s.gap) + 1, options.size.state_cap);
    return with_arith(options.size, [&](const auto& arith) {
        using Value = typename std::decay_t<decltype(arith)>::Value;
        std::vector<Value> t(static_cast<std::size_t>(s.gap) + 1, arith.leaf());
        auto at = [&](std::int64_t g) -> const Value& { return t[static_cast<std::size_t>(std::max<std::int64_t>(g, 0))]; };
        for (std::int64_t g = 1; g <= s.gap; ++g) {
            const std::size_t i = choose(g, static_cast<double>(g) / static_cast<double>(s.scale));
            t[static_cast<std::size_t>(g)] = arith.join(at(g - s.left[i]), at(g - s.right[i]));
        }
        return arith.finish(t.back());
    });
}

bool gap_independent(const ScoringPolicy& policy) {
    return std::holds_alternative<LinearPolicy>(policy) || std::holds_alternative<ProductPolicy>(policy) ||
           std::holds_alternative<RatioPolicy>(policy);
}

SelectionContext full_context(const BranchingInstance& inst, double gap, const SimOptions& options) {
    SelectionContext ctx;
    ctx.gap = gap;
    ctx.candidates = inst.variables();
    ctx.ratio = options.ratio;
    ctx.cache = options.cache;
    return ctx;
}

std::size_t generic_choice(const BranchingInstance& inst, const ScoringPolicy& policy, const SimOptions& options,
                           double gap, const std::string& mults) {
    std::vector<VariableGains> candidates;
    std::vector<std::uint32_t> remaining;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (mults[i] == 0) continue;
        candidates.push_back(inst.variables()[i]);
        remaining.push_back(static_cast<unsigned char>(mults[i]));
        index.push_back(i);
    }
    if (candidates.empty()) return kNone;
    SelectionContext ctx;
    ctx.gap = gap;
    ctx.candidates = candidates;
    ctx.multiplicities = remaining;
    ctx.ratio = options.ratio;
    ctx.cache = options.cache;
    return index[select(ctx, policy)];
}

// Walks the ratio ranking over remaining uses: the all-left path of the
// ratio tree below this node.
double longest_path_height(const ScaledInstance& s, const std::vector<std::size_t>& ratio_rank, std::int64_t gap,
                           const std::string& mults) {
    std::int64_t residual = gap;
    double height = 0.0;
    for (const std::size_t i : ratio_rank) {
        const auto m = static_cast<unsigned char>(mults[i]);
        if (m == 0) continue;
        const std::int64_t needed = ceil_div(residual, s.left[i]);
        const std::int64_t taken = std::min<std::int64_t>(needed, m);
        height += static_cast<double>(taken);
        if (taken == needed) return height;
        residual -= taken * s.left[i];
    }
    return std::numeric_limits<double>::infinity();
}

SimOptions with_local_cache(const SimOptions& options, RatioCache& local) {
    SimOptions out = options;
    if (!out.cache) out.cache = &local;
    return out;
}

}  // namespace

char data_type_code(DataType dt) noexcept {
    switch (dt) {
        case DataType::Balanced: return 'B';
        case DataType::Unbalanced: return 'U';
        case DataType::VeryUnbalanced: return 'V';
        case DataType::ExtremelyUnbalanced: return 'X';
    }
    return '?';
}

std::optional<DataType> parse_data_type(std::string_view code) noexcept {
    if (code == "B") return DataType::Balanced;
    if (code == "U") return DataType::Unbalanced;
    if (code == "V") return DataType::VeryUnbalanced;
    if (code == "X") return DataType::ExtremelyUnbalanced;
    return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t master, DataType dt, std::uint64_t index, std::uint64_t attempt) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(data_type_code(dt)));
    h = splitmix64(h ^ index);
    return splitmix64(h ^ attempt);
}

BranchingInstance generate_instance(DataType dt, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorKind::InvalidInstance, "an instance needs at least one variable");
    std::mt19937_64 rng(seed);
    std::vector<VariableGains> vars;
    vars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t l = 0;
        std::int64_t r = 0;
        switch (dt) {
            case DataType::Balanced:
                l = uniform_int(rng, 1, 1000);
                r = uniform_int(rng, 1, 1000);
                break;
            case DataType::Unbalanced:
                l = uniform_int(rng, 1, 500);
                r = uniform_int(rng, 501, 1000);
                break;
            case DataType::VeryUnbalanced:
                l = uniform_int(rng, 1, 250);
                r = uniform_int(rng, 251, 1000);
                break;
            case DataType::ExtremelyUnbalanced:
                l = uniform_int(rng, 1, 100);
                r = uniform_int(rng, 101, 1000);
                break;
        }
        vars.push_back(make_variable(static_cast<double>(std::min(l, r)), static_cast<double>(std::max(l, r))));
    }
    return BranchingInstance(std::move(vars), 1.0);
}

TreeSize simulate_policy_tree(const BranchingInstance& inst, double gap, const ScoringPolicy& policy,
                              const SimOptions& options_in) {
    RatioCache local(options_in.ratio);
    const SimOptions options = with_local_cache(options_in, local);
    if (!(gap > 0.0)) return TreeSize();

    if (!inst.multiplicities()) {
        if (gap_independent(policy)) {
            const std::size_t i = select(full_context(inst, gap, options), policy);
            return svb_size_recurrence(inst.variables()[i], gap, options.size);
        }
        if (const auto* hybrid = std::get_if<HybridPolicy>(&policy)) {
            const SelectionContext ctx = full_context(inst, gap, options);
            const std::size_t by_ratio = select_ratio(ctx);
            const std::size_t by_product = select_product(ctx);
            const ScaledInstance s = detail::scale_to_integers(inst, gap);
            // With unlimited uses the ratio tree keeps one variable, so both
            // estimates are plain depths of that variable.
            const std::int64_t step =
                hybrid->estimate == HeightEstimate::MinDepth ? s.right[by_ratio] : s.left[by_ratio];
            return run_gap_dp(
                inst, gap,
                [&](std::int64_t g, double) {
                    const bool low = hybrid->height > 0 && ceil_div(g, step) <= hybrid->height;
                    return low ? by_product : by_ratio;
                },
                options);
        }
        return simulate_policy_tree_generic(inst, gap, policy, options);
    }

    const ScaledInstance s = detail::scale_to_integers(inst, gap);
    Chooser choose;
    std::vector<std::size_t> primary;
    std::vector<std::size_t> secondary;
    std::vector<std::size_t> by_left;
    if (const auto* p = std::get_if<LinearPolicy>(&policy)) {
        primary = linear_ranking(inst, p->mu);
    } else if (const auto* p = std::get_if<ProductPolicy>(&policy)) {
        primary = product_ranking(inst, p->eps);
    } else if (std::holds_alternative<RatioPolicy>(policy)) {
        primary = ratio_ranking(inst, options);
    }
    if (!primary.empty()) {
        choose = [&](std::int64_t, const std::string& mults) { return first_available(primary, mults); };
    } else if (const auto* hybrid = std::get_if<HybridPolicy>(&policy)) {
        primary = ratio_ranking(inst, options);
        secondary = product_ranking(inst, kDefaultProductEps);
        by_left = ranking(inst.size(), [&](std::size_t i) { return inst.variables()[i].left(); });
        choose = [&, hybrid](std::int64_t g, const std::string& mults) {
            const std::size_t by_ratio = first_available(primary, mults);
            if (by_ratio == kNone || hybrid->height == 0) return by_ratio;
            double height = 0.0;
            switch (hybrid->estimate) {
                case HeightEstimate::MinDepth: height = static_cast<double>(ceil_div(g, s.right[by_ratio])); break;
                case HeightEstimate::SingleVariable:
                    height = static_cast<double>(ceil_div(g, s.left[by_ratio]));
                    break;
                case HeightEstimate::LongestPath: height = longest_path_height(s, primary, g, mults); break;
                case HeightEstimate::WorstCasePath: height = longest_path_height(s, by_left, g, mults); break;
            }
            return height <= hybrid->height ? first_available(secondary, mults) : by_ratio;
        };
    } else {
        return simulate_policy_tree_generic(inst, gap, policy, options);
    }
    return run_policy_tree(inst, gap, choose, options);
}

TreeSize simulate_policy_tree_generic(const BranchingInstance& inst, double gap, const ScoringPolicy& policy,
                                      const SimOptions& options_in) {
    RatioCache local(options_in.ratio);
    const SimOptions options = with_local_cache(options_in, local);
    if (!(gap > 0.0)) return TreeSize();

    if (!inst.multiplicities()) {
        return run_gap_dp(
            inst, gap,
            [&](std::int64_t, double g) {
                SelectionContext ctx = full_context(inst, g, options);
                return select(ctx, policy);
            },
            options);
    }
    const ScaledInstance s = detail::scale_to_integers(inst, gap);
    const Chooser choose = [&](std::int64_t g, const std::string& mults) {
        return generic_choice(inst, policy, options, static_cast<double>(g) / static_cast<double>(s.scale), mults);
    };
    return run_policy_tree(inst, gap, choose, options);
}

double shifted_geometric_mean(const std::vector<double>& values, double shift) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (const double v : values) sum += std::log(v + shift);
    return std::exp(sum / static_cast<double>(values.size())) - shift;
}

std::vector<SeriesMetrics> aggregate_metrics(const std::vector<Series>& series, std::size_t reference) {
    if (series.empty()) return {};
    if (reference >= series.size()) throw Error(ErrorKind::DomainError, "reference series out of range");
    const std::size_t count = series[0].sizes.size();
    for (const auto& s : series) {
        if (s.sizes.size() != count) throw Error(ErrorKind::DomainError, "series are not aligned");
        for (const auto& size : s.sizes) {
            if (!size.is_finite()) throw Error(ErrorKind::DomainError, "metrics need finite sizes");
        }
    }

    constexpr double kLn10 = 2.302585092994046;
    // ln(10^x + shift) without forming 10^x.
    auto log_shifted = [](double log10_s, double shift) {
        const double ln_s = log10_s * kLn10;
        return ln_s + std::log1p(shift * std::exp(-ln_s));
    };
    // log10(exp(m) - shift), the shifted mean itself kept in log form.
    auto unshift = [](double mean_ln, double shift) {
        return (mean_ln + std::log1p(-shift * std::exp(-mean_ln))) / kLn10;
    };

    std::vector<SeriesMetrics> out;
    for (const auto& s : series) {
        SeriesMetrics m;
        m.name = s.name;
        double sum = 0.0;
        double sum10 = 0.0;
        double sum100 = 0.0;
        for (const auto& size : s.sizes) {
            const double x = size.log10();
            sum += x;
            sum10 += log_shifted(x, 10.0);
            sum100 += log_shifted(x, 100.0);
        }
        const double n = count == 0 ? 1.0 : static_cast<double>(count);
        m.geo_mean_log10 = sum / n;
        m.shifted_geo_mean_10_log10 = unshift(sum10 / n, 10.0);
        m.shifted_geo_mean_100_log10 = unshift(sum100 / n, 100.0);
        out.push_back(std::move(m));
    }
    for (auto& m : out) {
        m.ts_percent = 100.0 * std::expm1((m.geo_mean_log10 - out[reference].geo_mean_log10) * kLn10);
    }

    for (std::size_t k = 0; k < count; ++k) {
        const TreeSize* best = nullptr;
        for (const auto& s : series) {
            if (s.competes && (!best || s.sizes[k] < *best)) best = &s.sizes[k];
        }
        if (!best) break;
        for (std::size_t j = 0; j < series.size(); ++j) {
            if (series[j].competes && series[j].sizes[k] == *best) ++out[j].wins;
        }
    }
    return out;
}

namespace {

// Runs work(i) for i in [0, count) on `jobs` threads; the first exception (by
// index) is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& work) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                work(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SizeOptions experiment_size_options(bool exact, std::size_t state_cap) {
    SizeOptions size;
    size.state_cap = state_cap;
    size.arithmetic = exact ? Arithmetic::Exact : Arithmetic::Approx;
    return size;
}

}  // namespace

ExperimentReport run_mvb_experiment(const MvbExperimentConfig& cfg) {
    ExperimentReport report;
    RatioCache cache;
    SimOptions options;
    options.size = experiment_size_options(cfg.exact, cfg.state_cap);
    options.cache = &cache;
    const std::size_t p = cfg.policies.size();

    for (const DataType dt : cfg.data_types) {
        // Per instance: policies, then LB, then the optimum.
        std::vector<std::vector<TreeSize>> sizes(cfg.instances);
        std::vector<std::uint64_t> seeds(cfg.instances);
        parallel_for(cfg.instances, cfg.jobs, [&](std::size_t i) {
            seeds[i] = derive_seed(cfg.seed, dt, i);
            const BranchingInstance generated = generate_instance(dt, cfg.n, seeds[i]);
            const BranchingInstance inst(generated.variables(), cfg.gap);
            std::vector<TreeSize> svb;
            svb.reserve(inst.size());
            for (const auto& v : inst.variables()) svb.push_back(svb_size_recurrence(v, cfg.gap, options.size));
            auto& row = sizes[i];
            for (const auto& policy : cfg.policies) {
                if (gap_independent(policy)) {
                    row.push_back(svb[select(full_context(inst, cfg.gap, options), policy)]);
                } else {
                    row.push_back(simulate_policy_tree(inst, cfg.gap, policy, options));
                }
            }
            row.push_back(*std::min_element(svb.begin(), svb.end()));
            row.push_back(mvb_min_size(inst, cfg.gap, options.size).size);
        });

        std::vector<Series> series;
        for (const auto& policy : cfg.policies) series.push_back({policy_name(policy), {}, true});
        series.push_back({std::string(kLowerBoundSeries), {}, false});
        series.push_back({std::string(kOptimumSeries), {}, false});
        for (std::size_t i = 0; i < cfg.instances; ++i) {
            for (std::size_t j = 0; j < series.size(); ++j) {
                series[j].sizes.push_back(sizes[i][j]);
                report.rows.push_back({dt, cfg.gap, seeds[i], series[j].name, sizes[i][j]});
            }
        }
        report.groups.push_back({dt, cfg.gap, std::string(kOptimumSeries), aggregate_metrics(series, p + 1)});
    }
    return report;
}

std::vector<double> default_gvb_gaps(DataType dt) {
    switch (dt) {
        case DataType::Balanced: return {5000, 15000, 25000};
        case DataType::Unbalanced: return {5000, 12500, 20000};
        case DataType::VeryUnbalanced: return {5000, 7500, 10000};
        case DataType::ExtremelyUnbalanced: return {2000, 3000, 4000};
    }
    return {};
}

ExperimentReport run_gvb_experiment(const GvbExperimentConfig& cfg) {
    if (cfg.policies.empty() || cfg.reference >= cfg.policies.size()) {
        throw Error(ErrorKind::DomainError, "the reference must name one of the policies");
    }
    ExperimentReport report;
    RatioCache cache;
    SimOptions options;
    options.size = experiment_size_options(cfg.exact, cfg.state_cap);
    options.cache = &cache;

    for (const DataType dt : cfg.data_types) {
        const std::vector<double> gaps = cfg.gaps.empty() ? default_gvb_gaps(dt) : cfg.gaps;
        const double max_gap = *std::max_element(gaps.begin(), gaps.end());
        // With one use per variable, a tree closes the gap iff the left gains
        // together do.
        std::vector<std::uint64_t> seeds(cfg.instances);
        std::vector<BranchingInstance> instances;
        for (std::size_t i = 0; i < cfg.instances; ++i) {
            for (std::size_t attempt = 0;; ++attempt) {
                if (attempt >= cfg.max_attempts) {
                    throw Error(ErrorKind::Infeasible, "no feasible replacement for instance " + std::to_string(i));
                }
                const std::uint64_t seed = derive_seed(cfg.seed, dt, i, attempt);
                const BranchingInstance generated = generate_instance(dt, cfg.n, seed);
                double reach = 0.0;
                for (const auto& v : generated.variables()) reach += v.left();
                if (reach >= max_gap) {
                    seeds[i] = seed;
                    instances.emplace_back(generated.variables(), max_gap,
                                           std::vector<std::uint32_t>(generated.size(), 1));
                    break;
                }
                report.notes.push_back(std::string("data ") + data_type_code(dt) + " instance " + std::to_string(i) +
                                       " attempt " + std::to_string(attempt) + " (seed " + std::to_string(seed) +
                                       ") cannot close gap " + std::to_string(max_gap) + "; replaced");
            }
        }

        for (const double gap : gaps) {
            std::vector<std::vector<TreeSize>> sizes(cfg.instances);
            parallel_for(cfg.instances, cfg.jobs, [&](std::size_t i) {
                for (const auto& policy : cfg.policies) {
                    sizes[i].push_back(simulate_policy_tree(instances[i], gap, policy, options));
                }
            });
            std::vector<Series> series;
            for (const auto& policy : cfg.policies) series.push_back({policy_name(policy), {}, true});
            for (std::size_t i = 0; i < cfg.instances; ++i) {
                for (std::size_t j = 0; j < series.size(); ++j) {
                    series[j].sizes.push_back(sizes[i][j]);
                    report.rows.push_back({dt, gap, seeds[i], series[j].name, sizes[i][j]});
                }
            }
            report.groups.push_back(
                {dt, gap, series[cfg.reference].name, aggregate_metrics(series, cfg.reference)});
        }
    }
    return report;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "data_type,gap,instance_seed,policy,tree_size_mantissa,tree_size_exp10\n";
    char buf[64];
    for (const auto& row : report.rows) {
        const auto m = row.size.magnitude();
        std::snprintf(buf, sizeof buf, "%.15g", row.gap);
        out << data_type_code(row.data_type) << ',' << buf << ',' << row.instance_seed << ',' << row.policy << ',';
        std::snprintf(buf, sizeof buf, "%.15g", m.mantissa);
        out << buf << ',' << m.exp10 << '\n';
    }
    return out.str();
}

std::string report_summary_json(const ExperimentReport& report) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
        nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
        for (const auto& m : g.metrics) {
            metrics.push_back({{"name", m.name},
                               {"geo_mean_log10", m.geo_mean_log10},
                               {"shifted_geo_mean_10_log10", m.shifted_geo_mean_10_log10},
                               {"shifted_geo_mean_100_log10", m.shifted_geo_mean_100_log10},
                               {"ts_percent", m.ts_percent},
                               {"wins", m.wins}});
        }
        groups.push_back({{"data_type", std::string(1, data_type_code(g.data_type))},
                          {"gap", g.gap},
                          {"reference", g.reference},
                          {"metrics", metrics}});
    }
    nlohmann::ordered_json out{{"groups", groups}, {"notes", report.notes}};
    return out.dump(2);
}

}  // namespace branchlab
