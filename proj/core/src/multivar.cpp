#include "branchlab/multivar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <unordered_map>

#include "branchlab/error.hpp"
#include "branchlab/lattice.hpp"
#include "count_arith.hpp"
#include "scaled_instance.hpp"

namespace branchlab {

namespace {

using detail::check_states;
using detail::ScaledInstance;
using detail::scale_to_integers;

// Bottom-up MVB recurrence. observe(g, sums, best) sees, for every gap, the
// per-variable values 1 + t(g - l_i) + t(g - r_i) and the chosen index.
template <class Arith, class Observer>
typename Arith::Value mvb_dp(const ScaledInstance& s, const Arith& arith, std::vector<std::uint32_t>& choice,
                             Observer&& observe) {
    using Value = typename Arith::Value;
    const std::size_t n = s.left.size();
    const std::int64_t max_r = *std::max_element(s.right.begin(), s.right.end());
    const auto window = static_cast<std::size_t>(max_r) + 1;
    std::vector<Value> ring(window, arith.leaf());
    const Value leaf = arith.leaf();
    auto at = [&](std::int64_t g) -> const Value& {
        return g > 0 ? ring[static_cast<std::size_t>(g) % window] : leaf;
    };

    choice.assign(static_cast<std::size_t>(s.gap) + 1, 0);
    std::vector<Value> sums(n, arith.leaf());
    for (std::int64_t g = 1; g <= s.gap; ++g) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sums[i] = arith.join(at(g - s.left[i]), at(g - s.right[i]));
            if (i > 0 && arith.compare(sums[i], sums[best]) < 0) best = i;
        }
        observe(g, sums, best);
        choice[static_cast<std::size_t>(g)] = static_cast<std::uint32_t>(best);
        ring[static_cast<std::size_t>(g) % window] = sums[best];
    }
    return at(s.gap);
}

template <class F>
auto with_arith(const SizeOptions& options, F&& f) {
    if (options.arithmetic == Arithmetic::Approx) return f(detail::LogArith{});
    return f(detail::ExactArith{options.digit_budget});
}

// Memoized GVB recursion. Remaining multiplicities are packed one byte per
// variable behind the 8-byte residual gap.
template <class Arith>
class GvbSolver {
public:
    using Value = typename Arith::Value;

    GvbSolver(const ScaledInstance& s, const Arith& arith, std::size_t state_cap)
        : s_(s), arith_(arith), state_cap_(state_cap) {}

    Value solve(std::int64_t gap, std::string& mults) {
        if (gap <= 0) return arith_.leaf();
        // The all-left path is the shallowest-closing one; if even it cannot
        // close the gap, nothing can.
        std::int64_t reach = 0;
        for (std::size_t i = 0; i < mults.size(); ++i) {
            reach += s_.left[i] * static_cast<unsigned char>(mults[i]);
        }
        if (reach < gap) return arith_.infinite();

        std::string key(sizeof gap, '\0');
        std::memcpy(key.data(), &gap, sizeof gap);
        key += mults;
        if (const auto it = memo_.find(key); it != memo_.end()) return it->second;

        Value best = arith_.infinite();
        for (std::size_t i = 0; i < mults.size(); ++i) {
            if (mults[i] == 0) continue;
            --mults[i];
            Value left = solve(gap - s_.left[i], mults);
            Value right = solve(gap - s_.right[i], mults);
            ++mults[i];
            Value candidate = arith_.join(left, right);
            if (arith_.compare(candidate, best) < 0) best = std::move(candidate);
        }
        check_states(memo_.size() + 1, state_cap_);
        memo_.emplace(std::move(key), best);
        return best;
    }

    std::size_t states() const noexcept { return memo_.size(); }

private:
    const ScaledInstance& s_;
    Arith arith_;
    std::size_t state_cap_;
    std::unordered_map<std::string, Value> memo_;
};

}  // namespace

MvbSolution mvb_min_size(const BranchingInstance& inst, double gap, const SizeOptions& options) {
    MvbSolution out;
    if (!(gap > 0.0)) {
        out.size = TreeSize();
        return out;
    }
    const ScaledInstance s = scale_to_integers(inst, gap);
    check_states(static_cast<std::size_t>(s.gap) + 1, options.state_cap);
    out.scale = s.scale;
    out.size = with_arith(options, [&](const auto& arith) {
        return arith.finish(mvb_dp(s, arith, out.choice_by_gap, [](auto, const auto&, auto) {}));
    });
    out.root_choice = out.choice_by_gap.back();
    return out;
}

double mvb_ratio(const BranchingInstance& inst, const RatioOptions& options) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : inst.variables()) best = std::min(best, svb_ratio(v, options).phi);
    return best;
}

std::optional<std::int64_t> mvb_root_threshold(const BranchingInstance& inst, std::int64_t max_gap,
                                               const SizeOptions& options, const RatioOptions& ratio_options) {
    if (inst.size() < 2) {
        throw Error(ErrorKind::InvalidInstance, "the root threshold needs at least two variables");
    }
    for (const auto& v : inst.variables()) {
        if (std::floor(v.left()) != v.left() || std::floor(v.right()) != v.right()) {
            throw Error(ErrorKind::DomainError, "the root threshold needs integer gains");
        }
    }
    if (max_gap < 1) return std::nullopt;

    std::size_t best_ratio = 0;
    double best_phi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double phi = svb_ratio(inst.variables()[i], ratio_options).phi;
        if (phi < best_phi) {
            best_phi = phi;
            best_ratio = i;
        }
    }

    const ScaledInstance s = scale_to_integers(inst, static_cast<double>(max_gap));
    check_states(static_cast<std::size_t>(s.gap) + 1, options.state_cap);
    std::vector<char> in_argmin(static_cast<std::size_t>(s.gap) + 1, 0);
    std::vector<std::uint32_t> choice;
    with_arith(options, [&](const auto& arith) {
        mvb_dp(s, arith, choice, [&](std::int64_t g, const auto& sums, std::size_t best) {
            in_argmin[static_cast<std::size_t>(g)] = arith.compare(sums[best_ratio], sums[best]) == 0;
        });
        return 0;
    });

    std::optional<std::int64_t> threshold;
    for (std::int64_t g = max_gap; g >= 1 && in_argmin[static_cast<std::size_t>(g)]; --g) threshold = g;
    return threshold;
}

GvbSolution gvb_min_size(const BranchingInstance& inst, double gap, const GvbOptions& options) {
    if (!inst.multiplicities()) {
        throw Error(ErrorKind::InvalidInstance, "the general problem needs multiplicities");
    }
    const auto& m = *inst.multiplicities();
    const std::uint64_t total = std::accumulate(m.begin(), m.end(), std::uint64_t{0});
    if (total > options.multiplicity_cap) {
        throw Error(ErrorKind::BudgetExceeded, "multiplicity sum " + std::to_string(total) + " exceeds cap " +
                                                   std::to_string(options.multiplicity_cap));
    }
    GvbSolution out;
    if (!(gap > 0.0)) {
        out.size = TreeSize();
        return out;
    }
    const ScaledInstance s = scale_to_integers(inst, gap);
    std::string mults;
    for (const auto mi : m) mults.push_back(static_cast<char>(std::min<std::uint32_t>(mi, 255)));

    out.size = with_arith(options.size, [&](const auto& arith) {
        GvbSolver solver(s, arith, options.size.state_cap);
        auto value = solver.solve(s.gap, mults);
        out.states_visited = solver.states();
        return arith.finish(value);
    });
    if (out.size.is_infinite()) {
        throw Error(ErrorKind::Infeasible, "no tree closes the gap within the multiplicities");
    }
    return out;
}

BranchingInstance knapsack_to_gvb(std::span<const std::uint64_t> weights, std::uint64_t capacity) {
    if (weights.empty() || capacity == 0 ||
        std::any_of(weights.begin(), weights.end(), [](auto w) { return w == 0; })) {
        throw Error(ErrorKind::DomainError, "knapsack weights and capacity must be positive");
    }
    const std::uint64_t c = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
    if (c < capacity) {
        throw Error(ErrorKind::InfeasibleKnapsack, "total weight " + std::to_string(c) +
                                                       " is below the capacity " + std::to_string(capacity));
    }
    const auto cd = static_cast<double>(c);
    std::vector<VariableGains> vars;
    for (const auto w : weights) vars.push_back(make_variable(cd, cd + static_cast<double>(w)));
    vars.push_back(make_variable(cd, cd));
    const double gap = static_cast<double>(weights.size()) * cd + static_cast<double>(capacity);
    std::vector<std::uint32_t> mults(vars.size(), 1);
    return BranchingInstance(std::move(vars), gap, std::move(mults));
}

std::uint64_t count_knapsack_covers(std::span<const std::uint64_t> weights, std::uint64_t capacity) {
    if (weights.size() > 25) {
        throw Error(ErrorKind::BudgetExceeded, "enumeration is limited to 25 items");
    }
    // Gray-code walk: each step toggles exactly one item.
    const std::uint64_t count = std::uint64_t{1} << weights.size();
    std::uint64_t sum = 0;
    std::uint64_t gray = 0;
    std::uint64_t covers = capacity == 0 ? 1 : 0;
    for (std::uint64_t i = 1; i < count; ++i) {
        const int bit = std::countr_zero(i);
        gray ^= std::uint64_t{1} << bit;
        if (gray & (std::uint64_t{1} << bit)) {
            sum += weights[static_cast<std::size_t>(bit)];
        } else {
            sum -= weights[static_cast<std::size_t>(bit)];
        }
        if (sum >= capacity) ++covers;
    }
    return covers;
}

}  // namespace branchlab
