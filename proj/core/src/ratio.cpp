#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "branchlab/error.hpp"
#include "branchlab/svb.hpp"

namespace branchlab {

namespace {

// p, p' and p'' at x, all through logarithms so x near 1 keeps its precision.
struct PolyValues {
    double p;
    double dp;
    double d2p;
};

PolyValues poly_values(double l, double r, double x) {
    const double lx = std::log(x);
    const double xr = std::exp(r * lx);
    const double xrl = std::exp((r - l) * lx);
    return {xrl * std::expm1(l * lx) - 1.0, (r * xr - (r - l) * xrl) / x,
            (r * (r - 1.0) * xr - (r - l) * (r - l - 1.0) * xrl) / (x * x)};
}

[[noreturn]] void no_convergence(RatioMethod m, const VariableGains& v, int iterations) {
    throw Error(ErrorKind::NoConvergence, std::string(ratio_method_name(m)) + " did not converge for (" +
                                              std::to_string(v.left()) + ", " + std::to_string(v.right()) +
                                              ") after " + std::to_string(iterations) + " iterations");
}

struct Bracket {
    double lo;
    double hi;
};

Bracket initial_bracket(const VariableGains& v) {
    return {std::exp2(1.0 / v.right()), std::exp2(1.0 / v.left())};
}

// |p(x)| / max(1, x p'(x)): to first order the relative error of x as a root.
// An absolute bound on |p| is out of reach for large gains, where one ulp of
// x already moves p by about r * 1e-16.
double relative_residual(const VariableGains& v, double x) {
    const PolyValues pv = poly_values(v.left(), v.right(), x);
    return std::fabs(pv.p) / std::max(1.0, x * std::fabs(pv.dp));
}

bool converged(const VariableGains& v, double x, double tol) { return relative_residual(v, x) <= tol; }

RatioResult finish(const VariableGains& v, RatioMethod m, double phi, int iterations) {
    const Bracket b = initial_bracket(v);
    phi = std::clamp(phi, b.lo, b.hi);
    return {phi, m, iterations, relative_residual(v, phi)};
}

RatioResult bisection(const VariableGains& v, const RatioOptions& opt) {
    auto [lo, hi] = initial_bracket(v);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (converged(v, mid, opt.tol)) return finish(v, RatioMethod::Bisection, mid, it);
        (char_poly_eval(v, mid) < 0.0 ? lo : hi) = mid;
    }
    no_convergence(RatioMethod::Bisection, v, opt.max_iterations);
}

// Newton and Laguerre share the loop: start at 2^(1/r), bisect the current
// sign bracket whenever a step leaves it or fails to halve the step before
// last (far right of the root Newton only shrinks x by about 1/r per step).
template <class Step>
RatioResult bracketed_iteration(const VariableGains& v, const RatioOptions& opt, RatioMethod m, Step&& step) {
    auto [lo, hi] = initial_bracket(v);
    double x = lo;
    double dx = hi - lo;
    double dx_old = dx;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const PolyValues pv = poly_values(v.left(), v.right(), x);
        if (std::fabs(pv.p) <= opt.tol * std::max(1.0, x * std::fabs(pv.dp))) return finish(v, m, x, it - 1);
        (pv.p < 0.0 ? lo : hi) = x;
        double next = step(x, pv);
        if (!std::isfinite(next) || next <= lo || next >= hi || std::fabs(next - x) > 0.5 * dx_old) {
            next = 0.5 * (lo + hi);
        }
        dx_old = dx;
        dx = std::fabs(next - x);
        x = next;
    }
    if (converged(v, x, opt.tol)) return finish(v, m, x, opt.max_iterations);
    no_convergence(m, v, opt.max_iterations);
}

RatioResult newton(const VariableGains& v, const RatioOptions& opt) {
    return bracketed_iteration(v, opt, RatioMethod::Newton,
                               [](double x, const PolyValues& pv) { return x - pv.p / pv.dp; });
}

RatioResult laguerre(const VariableGains& v, const RatioOptions& opt) {
    // The trinomial has degree r; fractional gains just use r as a real degree.
    const double n = std::max(v.right(), 2.0);
    return bracketed_iteration(v, opt, RatioMethod::Laguerre, [n](double x, const PolyValues& pv) {
        const double g = pv.dp / pv.p;
        const double h = g * g - pv.d2p / pv.p;
        const double root = std::sqrt(std::max((n - 1.0) * (n * h - g * g), 0.0));
        const double plus = g + root;
        const double minus = g - root;
        const double denom = std::fabs(plus) >= std::fabs(minus) ? plus : minus;
        if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return x - n / denom;
    });
}

// Iterates y -> 1 + 1/(y^(l/r) - 1) on y = phi^r from y = 2. The map is
// decreasing, so the iterates alternate around the fixed point; every two
// plain steps are followed by an Aitken extrapolation (Steffensen's scheme),
// which keeps near-balanced variables, where |f'| approaches 1, within the
// iteration cap.
RatioResult fixed_point(const VariableGains& v, const RatioOptions& opt) {
    const double e = v.left() / v.right();
    const double y_hi = std::exp2(v.right() / v.left());
    auto f = [e](double y) { return 1.0 + 1.0 / std::expm1(e * std::log(y)); };
    auto phi_of = [&v](double y) { return std::exp(std::log(y) / v.right()); };

    double y = 2.0;
    int evaluations = 0;
    while (evaluations < opt.max_iterations) {
        if (converged(v, phi_of(y), opt.tol)) return finish(v, RatioMethod::FixedPoint, phi_of(y), evaluations);
        const double y1 = f(y);
        const double y2 = f(y1);
        evaluations += 2;
        const double denom = (y2 - y1) - (y1 - y);
        double next = y2;
        if (denom != 0.0) {
            const double accel = y2 - (y2 - y1) * (y2 - y1) / denom;
            if (std::isfinite(accel) && accel >= 2.0 && accel <= y_hi) next = accel;
        }
        if (next == y) break;
        y = next;
    }
    if (converged(v, phi_of(y), opt.tol)) return finish(v, RatioMethod::FixedPoint, phi_of(y), evaluations);
    no_convergence(RatioMethod::FixedPoint, v, evaluations);
}

// Closed-form work allowed per evaluation; F stops doubling past this.
constexpr std::size_t kDirectTermCap = 1 << 16;

// phi = (t(F + r) / t(F))^(1/r) from the closed form, doubling F until the
// residual meets tol.
RatioResult direct(const VariableGains& v, const RatioOptions& opt) {
    SizeOptions exact;
    exact.digit_budget = std::numeric_limits<std::size_t>::max() / 8;
    exact.state_cap = kDirectTermCap;
    double base = opt.direct_gap_factor * v.right();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        BigInt lower;
        BigInt upper;
        try {
            lower = svb_size_closed_form(v, base, exact).exact_value();
            upper = svb_size_closed_form(v, base + v.right(), exact).exact_value();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BudgetExceeded) throw;
            no_convergence(RatioMethod::Direct, v, it - 1);
        }
        long e_lower = 0;
        long e_upper = 0;
        const double d_lower = mpz_get_d_2exp(&e_lower, lower.get_mpz_t());
        const double d_upper = mpz_get_d_2exp(&e_upper, upper.get_mpz_t());
        const double log_ratio =
            std::log(d_upper / d_lower) + static_cast<double>(e_upper - e_lower) * std::log(2.0);
        const double phi = std::exp(log_ratio / v.right());
        if (converged(v, phi, opt.tol)) return finish(v, RatioMethod::Direct, phi, it);
        base *= 2.0;
    }
    no_convergence(RatioMethod::Direct, v, opt.max_iterations);
}

}  // namespace

std::string_view ratio_method_name(RatioMethod m) noexcept {
    switch (m) {
        case RatioMethod::FixedPoint: return "fixed_point";
        case RatioMethod::Bisection: return "bisection";
        case RatioMethod::Newton: return "newton";
        case RatioMethod::Laguerre: return "laguerre";
        case RatioMethod::Direct: return "direct";
    }
    return "unknown";
}

std::optional<RatioMethod> parse_ratio_method(std::string_view name) noexcept {
    for (const auto m : {RatioMethod::FixedPoint, RatioMethod::Bisection, RatioMethod::Newton,
                         RatioMethod::Laguerre, RatioMethod::Direct}) {
        if (ratio_method_name(m) == name) return m;
    }
    return std::nullopt;
}

RatioMethod default_ratio_method(const VariableGains& v) noexcept {
    return v.right() / v.left() <= 100.0 ? RatioMethod::Laguerre : RatioMethod::FixedPoint;
}

RatioResult svb_ratio(const VariableGains& v, const RatioOptions& options) {
    if (!(options.tol > 0.0)) {
        throw Error(ErrorKind::DomainError, "ratio tolerance must be positive");
    }
    const RatioMethod method = options.method.value_or(default_ratio_method(v));
    if (v.left() == v.right()) return finish(v, method, std::exp2(1.0 / v.left()), 0);
    switch (method) {
        case RatioMethod::FixedPoint: return fixed_point(v, options);
        case RatioMethod::Bisection: return bisection(v, options);
        case RatioMethod::Newton: return newton(v, options);
        case RatioMethod::Laguerre: return laguerre(v, options);
        case RatioMethod::Direct: return direct(v, options);
    }
    return laguerre(v, options);
}

}  // namespace branchlab
