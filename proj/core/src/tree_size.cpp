#include "branchlab/tree_size.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "branchlab/error.hpp"

namespace branchlab {

namespace {

constexpr double kLog10Of2 = 0.30102999566398119521;

TreeSize::Approx normalize(double mantissa, std::int64_t exp10) {
    if (!(mantissa > 0.0) || !std::isfinite(mantissa)) {
        throw Error(ErrorKind::DomainError, "approximate tree size needs a positive finite mantissa");
    }
    const double shift = std::floor(std::log10(mantissa));
    mantissa /= std::pow(10.0, shift);
    exp10 += static_cast<std::int64_t>(shift);
    // log10/pow round-off can leave the mantissa a hair outside [1, 10).
    if (mantissa >= 10.0) {
        mantissa /= 10.0;
        ++exp10;
    } else if (mantissa < 1.0) {
        mantissa *= 10.0;
        --exp10;
    }
    return {mantissa, exp10};
}

TreeSize::Approx magnitude_of(const BigInt& v) {
    if (mpz_sizeinbase(v.get_mpz_t(), 2) < 1000) {
        return normalize(v.get_d(), 0);
    }
    long exp2 = 0;
    const double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());  // v = d * 2^exp2, d in [0.5, 1)
    const double l = static_cast<double>(exp2) * kLog10Of2;
    const double whole = std::floor(l);
    return normalize(d * std::pow(10.0, l - whole), static_cast<std::int64_t>(whole));
}

// a + b on normalized magnitudes.
TreeSize::Approx add(TreeSize::Approx a, TreeSize::Approx b) {
    if (a.exp10 < b.exp10) std::swap(a, b);
    const std::int64_t diff = a.exp10 - b.exp10;
    if (diff > 20) return a;
    return normalize(a.mantissa + b.mantissa * std::pow(10.0, -static_cast<double>(diff)), a.exp10);
}

// Three-way compare of magnitudes with the relative tolerance folded in.
std::partial_ordering compare_magnitudes(TreeSize::Approx a, TreeSize::Approx b) {
    const std::int64_t diff = a.exp10 - b.exp10;
    if (diff > 1) return std::partial_ordering::greater;
    if (diff < -1) return std::partial_ordering::less;
    const double ma = a.mantissa * std::pow(10.0, static_cast<double>(diff));
    const double mb = b.mantissa;
    if (std::fabs(ma - mb) <= kSizeRelTolerance * std::max(ma, mb)) {
        return std::partial_ordering::equivalent;
    }
    return ma < mb ? std::partial_ordering::less : std::partial_ordering::greater;
}

}  // namespace

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonPositiveGain: return "NonPositiveGain";
        case ErrorKind::NonFiniteGain: return "NonFiniteGain";
        case ErrorKind::InvalidInstance: return "InvalidInstance";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::InfeasibleKnapsack: return "InfeasibleKnapsack";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

TreeSize TreeSize::exact(BigInt value, std::size_t digit_budget) {
    if (sgn(value) < 0) {
        throw Error(ErrorKind::DomainError, "tree size cannot be negative");
    }
    const double bit_budget = static_cast<double>(digit_budget) / kLog10Of2;
    if (static_cast<double>(mpz_sizeinbase(value.get_mpz_t(), 2)) > bit_budget) {
        return TreeSize(magnitude_of(value));
    }
    return TreeSize(std::move(value));
}

TreeSize TreeSize::approx(double mantissa, std::int64_t exp10) {
    return TreeSize(normalize(mantissa, exp10));
}

TreeSize TreeSize::from_log10(double log10_value) {
    if (std::isinf(log10_value) && log10_value > 0) return infinite();
    if (!std::isfinite(log10_value)) {
        throw Error(ErrorKind::DomainError, "log10 of a tree size must be finite");
    }
    const double whole = std::floor(log10_value);
    return approx(std::pow(10.0, log10_value - whole), static_cast<std::int64_t>(whole));
}

TreeSize TreeSize::join(const TreeSize& left, const TreeSize& right, std::size_t digit_budget) {
    if (left.is_infinite() || right.is_infinite()) return infinite();
    if (left.is_exact() && right.is_exact()) {
        BigInt sum = left.exact_value() + right.exact_value();
        sum += 1;
        return exact(std::move(sum), digit_budget);
    }
    return TreeSize(add(add(left.magnitude(), right.magnitude()), Approx{1.0, 0}));
}

TreeSize TreeSize::times_power(double base, double exponent) const {
    if (is_infinite()) return *this;
    if (!(base > 0.0) || !std::isfinite(base) || !std::isfinite(exponent)) {
        throw Error(ErrorKind::DomainError, "times_power needs a positive finite base and finite exponent");
    }
    const Approx m = magnitude();
    const double l = exponent * std::log10(base);
    const double whole = std::floor(l);
    return TreeSize(normalize(m.mantissa * std::pow(10.0, l - whole),
                              m.exp10 + static_cast<std::int64_t>(whole)));
}

const BigInt& TreeSize::exact_value() const {
    if (const auto* v = std::get_if<BigInt>(&value_)) return *v;
    throw Error(ErrorKind::DomainError, "tree size is not exact: " + to_string());
}

TreeSize::Approx TreeSize::magnitude() const {
    if (const auto* v = std::get_if<BigInt>(&value_)) {
        if (sgn(*v) == 0) {
            throw Error(ErrorKind::DomainError, "zero has no magnitude");
        }
        return magnitude_of(*v);
    }
    if (const auto* a = std::get_if<Approx>(&value_)) return *a;
    throw Error(ErrorKind::DomainError, "infinite tree size has no magnitude");
}

double TreeSize::log10() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    const Approx m = magnitude();
    return static_cast<double>(m.exp10) + std::log10(m.mantissa);
}

std::string TreeSize::to_string() const {
    if (const auto* v = std::get_if<BigInt>(&value_)) return v->get_str();
    if (is_infinite()) return "inf";
    const Approx m = magnitude();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12fe%+lld", m.mantissa, static_cast<long long>(m.exp10));
    return buf;
}

bool operator==(const TreeSize& a, const TreeSize& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
}

std::partial_ordering operator<=>(const TreeSize& a, const TreeSize& b) {
    if (a.is_infinite() || b.is_infinite()) {
        if (a.is_infinite() && b.is_infinite()) return std::partial_ordering::equivalent;
        return a.is_infinite() ? std::partial_ordering::greater : std::partial_ordering::less;
    }
    if (a.is_exact() && b.is_exact()) {
        const int c = cmp(a.exact_value(), b.exact_value());
        if (c < 0) return std::partial_ordering::less;
        if (c > 0) return std::partial_ordering::greater;
        return std::partial_ordering::equivalent;
    }
    return compare_magnitudes(a.magnitude(), b.magnitude());
}

}  // namespace branchlab
