#include <cmath>
#include <random>

#include <doctest.h>

#include "branchlab/error.hpp"
#include "branchlab/svb.hpp"
#include "oracles.hpp"

using namespace branchlab;

namespace {

BigInt exact(const TreeSize& s) { return s.exact_value(); }

const RatioMethod kMethods[] = {RatioMethod::FixedPoint, RatioMethod::Bisection, RatioMethod::Newton,
                                RatioMethod::Laguerre, RatioMethod::Direct};

}  // namespace

TEST_CASE("svb_size_recurrence small values") {
    CHECK(exact(svb_size_recurrence(make_variable(2, 5), 6)) == 9);
    CHECK(exact(svb_size_recurrence(make_variable(3, 3), 7)) == 15);
    CHECK(exact(svb_size_recurrence(make_variable(1, 1), 10)) == 2047);
    CHECK(exact(svb_size_recurrence(make_variable(2, 5), 0)) == 1);
    CHECK(exact(svb_size_recurrence(make_variable(2, 5), -3)) == 1);
}

TEST_CASE("svb sizes agree with explicitly built trees") {
    for (long l = 1; l <= 4; ++l) {
        for (long r = l; r <= 6; ++r) {
            for (long g = 0; g <= 14; ++g) {
                const auto tree = oracle::build_svb_tree(l, r, g);
                const long nodes = oracle::count_nodes(tree.get());
                CHECK(nodes == 2 * oracle::count_leaves(tree.get()) - 1);
                CHECK(exact(svb_size_recurrence(make_variable(l, r), g)) == nodes);
                if (g > 0) CHECK(exact(svb_size_closed_form(make_variable(l, r), g)) == nodes);
            }
        }
    }
}

TEST_CASE("closed form equals the top-down recursion") {
    for (long l = 1; l <= 12; ++l) {
        for (long r = l; r <= 12; ++r) {
            for (long g = 1; g <= 200; g += 7) {
                const auto v = make_variable(l, r);
                const auto expected = oracle::svb(l, r, g);
                CHECK(exact(svb_size_closed_form(v, g)) == expected);
                CHECK(exact(svb_size_recurrence(v, g)) == expected);
            }
        }
    }
}

TEST_CASE("sizes with rational and irrational gains") {
    // (0.5, 1.25) at 1.5 is (2, 5) at 6 scaled by 1/4.
    CHECK(exact(svb_size_recurrence(make_variable(0.5, 1.25), 1.5)) == 9);
    CHECK(exact(svb_size_closed_form(make_variable(0.5, 1.25), 1.5)) == 9);
    // Irrational gains: explicit lattice walk versus the closed form.
    const auto v = make_variable(std::sqrt(2.0), std::sqrt(3.0));
    std::function<long(double)> walk = [&](double g) -> long {
        return g <= 0 ? 1 : 1 + walk(g - v.left()) + walk(g - v.right());
    };
    for (double g : {0.5, 3.0, 7.7, 12.3}) {
        CHECK(exact(svb_size_recurrence(v, g)) == walk(g));
        CHECK(exact(svb_size_closed_form(v, g)) == walk(g));
    }
}

TEST_CASE("closed form expansion for (2,5) at 6") {
    // k = 1: C(1 + ceil(6/2) - 1, 1) = C(3,1) = 3; k = 2: C(2 + ceil(1/2) - 1, 2) = C(2,2) = 1.
    const BigInt by_hand = 1 + 2 * (3 + 1);
    CHECK(exact(svb_size_closed_form(make_variable(2, 5), 6)) == by_hand);
    CHECK(exact(svb_size_closed_form(make_variable(2, 5), 7)) == 11);
}

TEST_CASE("sizes are odd and non-decreasing in the gap") {
    for (const auto& [l, r] : {std::pair{1, 3}, {2, 5}, {4, 9}, {7, 7}}) {
        const auto series = svb_size_recurrence_series(make_variable(l, r), 300);
        for (std::size_t g = 0; g < series.size(); ++g) {
            CHECK(mpz_odd_p(exact(series[g]).get_mpz_t()));
            if (g > 0) CHECK(series[g - 1] <= series[g]);
        }
    }
}

TEST_CASE("Fibonacci identity for (1,2)") {
    // s(G) = t(G) + 1 with s(-1) = s(0) = 2 follows s(G) = s(G-1) + s(G-2).
    const auto series = svb_size_recurrence_series(make_variable(1, 2), 80);
    BigInt s_prev2 = 2;
    BigInt s_prev1 = exact(series[0]) + 1;
    CHECK(s_prev1 == 2);
    for (std::size_t g = 1; g < series.size(); ++g) {
        const BigInt s = exact(series[g]) + 1;
        CHECK(s == s_prev1 + s_prev2);
        s_prev2 = s_prev1;
        s_prev1 = s;
    }
}

TEST_CASE("recurrence budget") {
    SizeOptions small;
    small.state_cap = 100;
    CHECK_THROWS_AS(svb_size_recurrence(make_variable(1, 2), 1000, small), Error);
    try {
        svb_size_recurrence(make_variable(1, 2), 1000, small);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
}

TEST_CASE("approx arithmetic tracks exact sizes") {
    SizeOptions approx;
    approx.arithmetic = Arithmetic::Approx;
    for (double g : {10.0, 100.0, 1000.0}) {
        const auto v = make_variable(2, 49);
        const TreeSize e = svb_size_recurrence(v, g);
        const TreeSize a = svb_size_recurrence(v, g, approx);
        CHECK(a.log10() == doctest::Approx(e.log10()).epsilon(1e-12));
    }
}

TEST_CASE("ratio examples") {
    CHECK(svb_ratio(make_variable(10, 10)).phi == doctest::Approx(std::pow(2.0, 0.1)).epsilon(1e-15));
    CHECK(svb_ratio(make_variable(10, 10)).iterations == 0);
    CHECK(svb_ratio(make_variable(2, 49)).phi == doctest::Approx(1.049).epsilon(1e-3));
    CHECK(svb_ratio(make_variable(1, 2)).phi == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(svb_ratio(make_variable(6, 10)).phi == doctest::Approx(1.0926).epsilon(1e-4));
    CHECK(svb_ratio(make_variable(1, 15)).phi == doctest::Approx(1.1468).epsilon(1e-4));
    CHECK(svb_ratio(make_variable(1, 60)).phi == doctest::Approx(1.0515).epsilon(1e-4));
}

TEST_CASE("default ratio method") {
    CHECK(default_ratio_method(make_variable(1, 100)) == RatioMethod::Laguerre);
    CHECK(default_ratio_method(make_variable(1, 101)) == RatioMethod::FixedPoint);
    CHECK(svb_ratio(make_variable(1, 500)).method == RatioMethod::FixedPoint);
    CHECK(parse_ratio_method("fixed_point") == RatioMethod::FixedPoint);
    CHECK_FALSE(parse_ratio_method("secant"));
}

TEST_CASE("ratio methods agree with an independent bisection and obey the bounds") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> gain(1, 1000);
    for (int i = 0; i < 200; ++i) {
        const auto v = make_variable(gain(rng), gain(rng));
        const double expected = static_cast<double>(oracle::ratio(v.left(), v.right()));
        for (const RatioMethod m : {RatioMethod::FixedPoint, RatioMethod::Bisection, RatioMethod::Newton,
                                    RatioMethod::Laguerre}) {
            RatioOptions opt;
            opt.method = m;
            const RatioResult res = svb_ratio(v, opt);
            CAPTURE(v.left());
            CAPTURE(v.right());
            CAPTURE(ratio_method_name(m));
            CHECK(res.residual <= opt.tol);
            CHECK(std::fabs(res.phi - expected) <= 10 * opt.tol);
            CHECK(res.phi >= std::pow(2.0, 1.0 / v.right()) * (1 - 1e-15));
            CHECK(res.phi <= std::pow(2.0, 1.0 / v.left()) * (1 + 1e-15));
        }
    }
}

TEST_CASE("direct ratio method on moderately unbalanced variables") {
    for (const auto& [l, r] : {std::pair{1, 2}, {3, 13}, {2, 49}, {1, 100}, {6, 10}, {1, 60}}) {
        const auto v = make_variable(l, r);
        RatioOptions opt;
        opt.method = RatioMethod::Direct;
        const RatioResult res = svb_ratio(v, opt);
        CHECK(res.method == RatioMethod::Direct);
        CHECK(res.phi == doctest::Approx(static_cast<double>(oracle::ratio(l, r))).epsilon(1e-10));
    }
}

TEST_CASE("ratio failures are NoConvergence") {
    RatioOptions opt;
    opt.method = RatioMethod::Direct;
    try {
        svb_ratio(make_variable(1, 1000), opt);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
    opt.method = RatioMethod::Newton;
    opt.max_iterations = 1;
    opt.tol = 1e-300;
    try {
        svb_ratio(make_variable(3, 17), opt);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
}

TEST_CASE("empirical growth converges to the ratio") {
    for (const auto& [l, r] : {std::pair{2, 49}, {3, 13}}) {
        const double phi = svb_ratio(make_variable(l, r)).phi;
        double prev_error = INFINITY;
        for (long g : {1000, 2000, 4000}) {
            std::map<long, oracle::Big> memo;
            const auto t = oracle::svb(l, r, g, memo);
            const double err_r = std::fabs(oracle::growth(t, oracle::svb(l, r, g + r, memo), r) - phi);
            const double err_l = std::fabs(oracle::growth(t, oracle::svb(l, r, g + l, memo), l) - phi);
            CHECK(err_r < prev_error);
            prev_error = err_r;
            if (g == 4000) {
                CHECK(err_r < 1e-3);
                CHECK(err_l < 1e-3);
            }
        }
    }
}

TEST_CASE("svb_size_approx") {
    const auto v = make_variable(2, 49);
    CHECK(svb_size_approx(v, 1000, 1000) == svb_size_recurrence(v, 1000));
    const auto close_to_exact = [](const VariableGains& var, double g, double f) {
        const double log_ratio = svb_size_approx(var, g, f).log10() - oracle::log_big(oracle::svb(
                                                                          long(var.left()), long(var.right()), long(g))) /
                                                                          std::log(10.0);
        return std::fabs(std::pow(10.0, log_ratio) - 1.0) < 0.05;
    };
    CHECK(close_to_exact(make_variable(10, 10), 1000, 100));
    CHECK(close_to_exact(v, 1000, 490));
    CHECK_THROWS_AS(svb_size_approx(v, 100, 200), Error);
}
