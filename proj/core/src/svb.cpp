#include "branchlab/svb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "branchlab/error.hpp"
#include "branchlab/lattice.hpp"
#include "count_arith.hpp"

namespace branchlab {

namespace {

[[noreturn]] void budget_exceeded(std::size_t states, std::size_t cap) {
    throw Error(ErrorKind::BudgetExceeded,
                "needs " + std::to_string(states) + " states, cap is " + std::to_string(cap));
}

template <class Arith>
std::vector<typename Arith::Value> integer_series(std::int64_t l, std::int64_t r, std::int64_t max_gap,
                                                  const Arith& arith) {
    std::vector<typename Arith::Value> t;
    t.reserve(static_cast<std::size_t>(std::max<std::int64_t>(max_gap, 0)) + 1);
    t.push_back(arith.leaf());
    for (std::int64_t g = 1; g <= max_gap; ++g) {
        const auto& left = g - l > 0 ? t[static_cast<std::size_t>(g - l)] : t[0];
        const auto& right = g - r > 0 ? t[static_cast<std::size_t>(g - r)] : t[0];
        t.push_back(arith.join(left, right));
    }
    return t;
}

// Bottom-up over 1..gap keeping only the last r values.
template <class Arith>
TreeSize integer_recurrence(std::int64_t l, std::int64_t r, std::int64_t gap, const Arith& arith) {
    using Value = typename Arith::Value;
    const auto window = static_cast<std::size_t>(r) + 1;
    std::vector<Value> ring(window, arith.leaf());
    auto at = [&](std::int64_t g) -> const Value& { return ring[static_cast<std::size_t>(g) % window]; };
    const Value leaf = arith.leaf();
    for (std::int64_t g = 1; g <= gap; ++g) {
        const Value& left = g - l > 0 ? at(g - l) : leaf;
        const Value& right = g - r > 0 ? at(g - r) : leaf;
        Value next = arith.join(left, right);
        ring[static_cast<std::size_t>(g) % window] = std::move(next);
    }
    return arith.finish(at(gap));
}

// Real gains: t(a, b) is the size below a node reached after a lefts and b
// rights; rows of equal b are swept from the deepest one up.
template <class Arith>
TreeSize lattice_recurrence(double l, double r, double gap, const SizeOptions& options, const Arith& arith) {
    using Value = typename Arith::Value;
    auto open = [&](std::int64_t a, std::int64_t b) {
        return gap - static_cast<double>(a) * l - static_cast<double>(b) * r > 0.0;
    };
    auto last_open_a = [&](std::int64_t b) -> std::int64_t {
        if (!open(0, b)) return -1;
        auto a = static_cast<std::int64_t>(std::floor((gap - static_cast<double>(b) * r) / l));
        while (a >= 0 && !open(a, b)) --a;
        while (open(a + 1, b)) ++a;
        return a;
    };
    std::int64_t b_max = 0;
    while (open(0, b_max + 1)) ++b_max;

    std::size_t states = 0;
    for (std::int64_t b = 0; b <= b_max; ++b) {
        states += static_cast<std::size_t>(last_open_a(b) + 1);
        if (states > options.state_cap) budget_exceeded(states, options.state_cap);
    }

    std::vector<Value> below;  // row b + 1
    for (std::int64_t b = b_max; b >= 0; --b) {
        const std::int64_t a_max = last_open_a(b);
        std::vector<Value> row(static_cast<std::size_t>(a_max + 1), arith.leaf());
        for (std::int64_t a = a_max; a >= 0; --a) {
            const Value leaf = arith.leaf();
            const Value& left = a + 1 <= a_max ? row[static_cast<std::size_t>(a + 1)] : leaf;
            const Value& right = a < static_cast<std::int64_t>(below.size())
                                     ? below[static_cast<std::size_t>(a)]
                                     : leaf;
            row[static_cast<std::size_t>(a)] = arith.join(left, right);
        }
        below = std::move(row);
    }
    return arith.finish(below.front());
}

template <class F>
TreeSize with_arith(const SizeOptions& options, F&& f) {
    if (options.arithmetic == Arithmetic::Approx) return f(detail::LogArith{});
    return f(detail::ExactArith{options.digit_budget});
}

std::optional<IntegerLattice> lattice_of(const VariableGains& v, double gap) {
    const std::array<double, 3> values{v.left(), v.right(), gap};
    return to_integer_lattice(values);
}

// Incremental C(n, k): lower n with k fixed, then raise k by one, batching the
// small factors so each GMP call sees a single 64-bit multiplier and divisor.
class BinomialWalker {
public:
    BinomialWalker(std::uint64_t n) : n_(n), k_(1), value_(static_cast<unsigned long>(n)) {}

    const BigInt& value() const { return value_; }

    // Moves C(n, k) to C(n2, k + 1), requiring k + 1 <= n2 <= n.
    std::size_t advance(std::uint64_t n2) {
        std::size_t steps = 0;
        std::uint64_t num = 1;
        std::uint64_t den = 1;
        auto flush = [&] {
            if (num != 1) value_ *= static_cast<unsigned long>(num);
            if (den != 1) mpz_divexact_ui(value_.get_mpz_t(), value_.get_mpz_t(), den);
            num = den = 1;
        };
        // C(m - 1, k) = C(m, k) * (m - k) / m, down to m = n2 - 1.
        while (n_ > n2 - 1) {
            const std::uint64_t f_num = n_ - k_;
            const std::uint64_t f_den = n_;
            if (num > UINT64_MAX / f_num || den > UINT64_MAX / f_den) {
                flush();
            }
            num *= f_num;
            den *= f_den;
            --n_;
            ++steps;
        }
        flush();
        // C(n2, k + 1) = C(n2 - 1, k) * n2 / (k + 1).
        value_ *= static_cast<unsigned long>(n2);
        mpz_divexact_ui(value_.get_mpz_t(), value_.get_mpz_t(), k_ + 1);
        n_ = n2;
        ++k_;
        return steps + 1;
    }

private:
    std::uint64_t n_;
    std::uint64_t k_;
    BigInt value_;
};

// Sum of the binomial terms for k = 1..terms given n_k = k + c_k - 1.
template <class CeilFn>
BigInt binomial_sum(std::int64_t terms, CeilFn&& ceil_term, std::size_t step_cap) {
    BigInt sum = 0;
    std::size_t steps = 0;
    BinomialWalker walker(static_cast<std::uint64_t>(ceil_term(1)));  // n_1 = c_1
    sum += walker.value();
    for (std::int64_t k = 2; k <= terms; ++k) {
        const auto n2 = static_cast<std::uint64_t>(k + ceil_term(k) - 1);
        steps += walker.advance(n2);
        if (steps > step_cap) budget_exceeded(steps, step_cap);
        sum += walker.value();
    }
    return sum;
}

}  // namespace

TreeSize svb_size_recurrence(const VariableGains& v, double gap, const SizeOptions& options) {
    if (!(gap > 0.0)) return TreeSize();
    if (const auto lat = lattice_of(v, gap)) {
        const std::int64_t l = lat->values[0], r = lat->values[1], g = lat->values[2];
        const auto states = static_cast<std::size_t>(g) + 1;
        if (states > options.state_cap) budget_exceeded(states, options.state_cap);
        return with_arith(options, [&](const auto& arith) { return integer_recurrence(l, r, g, arith); });
    }
    return with_arith(options, [&](const auto& arith) {
        return lattice_recurrence(v.left(), v.right(), gap, options, arith);
    });
}

std::vector<TreeSize> svb_size_recurrence_series(const VariableGains& v, std::int64_t max_gap,
                                                 const SizeOptions& options) {
    if (std::floor(v.left()) != v.left() || std::floor(v.right()) != v.right()) {
        throw Error(ErrorKind::DomainError, "series evaluation needs integer gains");
    }
    if (max_gap < 0) return {};
    const auto states = static_cast<std::size_t>(max_gap) + 1;
    if (states > options.state_cap) budget_exceeded(states, options.state_cap);
    const auto l = static_cast<std::int64_t>(v.left());
    const auto r = static_cast<std::int64_t>(v.right());
    std::vector<TreeSize> out;
    out.reserve(states);
    if (options.arithmetic == Arithmetic::Approx) {
        const detail::LogArith arith;
        for (const double x : integer_series(l, r, max_gap, arith)) out.push_back(arith.finish(x));
    } else {
        out = integer_series(l, r, max_gap, detail::ExactArith{options.digit_budget});
    }
    return out;
}

TreeSize svb_size_closed_form(const VariableGains& v, double gap, const SizeOptions& options) {
    if (!(gap > 0.0)) return TreeSize();
    BigInt sum;
    if (const auto lat = lattice_of(v, gap)) {
        const std::int64_t l = lat->values[0], r = lat->values[1], g = lat->values[2];
        const std::int64_t terms = ceil_div(g, r);
        sum = binomial_sum(terms, [&](std::int64_t k) { return ceil_div(g - (k - 1) * r, l); },
                           options.state_cap);
    } else {
        const auto terms = static_cast<std::int64_t>(std::ceil(gap / v.right()));
        sum = binomial_sum(
            terms,
            [&](std::int64_t k) {
                return static_cast<std::int64_t>(
                    std::ceil((gap - static_cast<double>(k - 1) * v.right()) / v.left()));
            },
            options.state_cap);
    }
    sum *= 2;
    sum += 1;
    return TreeSize::exact(std::move(sum), options.digit_budget);
}

TreeSize svb_size_approx(const VariableGains& v, double gap, double base_gap, const RatioOptions& options) {
    if (!(base_gap > 0.0) || base_gap > gap) {
        throw Error(ErrorKind::DomainError, "approximation needs 0 < F <= G");
    }
    const RatioResult ratio = svb_ratio(v, options);
    return svb_size_closed_form(v, base_gap).times_power(ratio.phi, gap - base_gap);
}

}  // namespace branchlab
