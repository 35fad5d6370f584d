#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "branchlab/error.hpp"
#include "branchlab/multivar.hpp"
#include "branchlab/sim.hpp"
#include "oracles.hpp"

using namespace branchlab;

namespace {

SimOptions exact_options() {
    SimOptions o;
    o.size.arithmetic = Arithmetic::Exact;
    return o;
}

// Builds the policy's tree node by node: remaining candidates and gap go to
// select(), the chosen variable loses one use on both subtrees.
std::optional<oracle::Big> policy_tree(const std::vector<VariableGains>& vars, std::vector<std::uint32_t> mults,
                                       double gap, const ScoringPolicy& policy) {
    if (gap <= 0) return oracle::Big(1);
    std::vector<VariableGains> cand;
    std::vector<std::uint32_t> cand_mults;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (mults[i] == 0) continue;
        cand.push_back(vars[i]);
        cand_mults.push_back(mults[i]);
        index.push_back(i);
    }
    if (cand.empty()) return std::nullopt;
    SelectionContext ctx;
    ctx.gap = gap;
    ctx.candidates = cand;
    ctx.multiplicities = cand_mults;
    const std::size_t i = index[select(ctx, policy)];
    --mults[i];
    const auto a = policy_tree(vars, mults, gap - vars[i].left(), policy);
    const auto b = policy_tree(vars, mults, gap - vars[i].right(), policy);
    if (!a || !b) return std::nullopt;
    return 1 + *a + *b;
}

const std::vector<ScoringPolicy> kAllPolicies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}, SvtsPolicy{},
                                                 HybridPolicy{0}, HybridPolicy{3},
                                                 HybridPolicy{3, HeightEstimate::MinDepth},
                                                 HybridPolicy{3, HeightEstimate::SingleVariable},
                                                 HybridPolicy{3, HeightEstimate::WorstCasePath}};

}  // namespace

TEST_CASE("data type codes") {
    CHECK(data_type_code(DataType::Balanced) == 'B');
    CHECK(data_type_code(DataType::ExtremelyUnbalanced) == 'X');
    CHECK(parse_data_type("V") == DataType::VeryUnbalanced);
    CHECK_FALSE(parse_data_type("Q"));
}

TEST_CASE("generate_instance is deterministic") {
    CHECK(generate_instance(DataType::Balanced, 100, 5) == generate_instance(DataType::Balanced, 100, 5));
    CHECK_FALSE(generate_instance(DataType::Balanced, 100, 5) == generate_instance(DataType::Balanced, 100, 6));
    CHECK(derive_seed(1, DataType::Balanced, 0) != derive_seed(1, DataType::Balanced, 1));
    CHECK(derive_seed(1, DataType::Balanced, 0) != derive_seed(1, DataType::Unbalanced, 0));
    CHECK(derive_seed(1, DataType::Balanced, 0, 1) != derive_seed(1, DataType::Balanced, 0));
    CHECK(derive_seed(1, DataType::Balanced, 3) == derive_seed(1, DataType::Balanced, 3));
}

TEST_CASE("generator ranges") {
    const std::map<DataType, std::array<int, 4>> ranges = {{DataType::Balanced, {1, 1000, 1, 1000}},
                                                           {DataType::Unbalanced, {1, 500, 501, 1000}},
                                                           {DataType::VeryUnbalanced, {1, 250, 251, 1000}},
                                                           {DataType::ExtremelyUnbalanced, {1, 100, 101, 1000}}};
    for (const auto& [dt, rg] : ranges) {
        const auto inst = generate_instance(dt, 10000, 42);
        CHECK(inst.size() == 10000);
        int lo_l = 10000, hi_l = 0, lo_r = 10000, hi_r = 0;
        for (const auto& v : inst.variables()) {
            CHECK(v.left() == std::floor(v.left()));
            CHECK(v.right() == std::floor(v.right()));
            lo_l = std::min(lo_l, int(v.left()));
            hi_l = std::max(hi_l, int(v.left()));
            lo_r = std::min(lo_r, int(v.right()));
            hi_r = std::max(hi_r, int(v.right()));
        }
        if (dt == DataType::Balanced) {
            CHECK(lo_l >= 1);
            CHECK(hi_r <= 1000);
        } else {
            CHECK(lo_l == rg[0]);
            CHECK(hi_l == rg[1]);
            CHECK(lo_r == rg[2]);
            CHECK(hi_r == rg[3]);
        }
    }
}

TEST_CASE("balanced gains have the order-statistic means") {
    // E[min] = sum_k P(min >= k) for two iid uniforms on 1..1000.
    double e_min = 0.0;
    for (int k = 1; k <= 1000; ++k) e_min += std::pow((1001.0 - k) / 1000.0, 2);
    const double e_max = 1001.0 - e_min;
    const auto inst = generate_instance(DataType::Balanced, 10000, 99);
    double sum_l = 0.0, sum_r = 0.0;
    for (const auto& v : inst.variables()) {
        sum_l += v.left();
        sum_r += v.right();
    }
    CHECK(e_min == doctest::Approx(333.8).epsilon(1e-3));
    CHECK(sum_l / 10000 == doctest::Approx(e_min).epsilon(0.03));
    CHECK(sum_r / 10000 == doctest::Approx(e_max).epsilon(0.03));
}

TEST_CASE("policy trees without multiplicities keep one variable") {
    const BranchingInstance inst({make_variable(10, 10), make_variable(2, 49)}, 1000);
    CHECK(simulate_policy_tree(inst, 1000, ProductPolicy{}, exact_options()) ==
          svb_size_recurrence(make_variable(10, 10), 1000));
    CHECK(simulate_policy_tree(inst, 1000, RatioPolicy{}, exact_options()) ==
          svb_size_recurrence(make_variable(2, 49), 1000));
    // svts at gap 40 picks (10,10) near the root, then keeps choosing per gap.
    const TreeSize svts = simulate_policy_tree(inst, 1000, SvtsPolicy{}, exact_options());
    CHECK(svts >= mvb_min_size(inst, 1000).size);
}

TEST_CASE("gap-dependent policies without multiplicities match a per-gap tree") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> gain(1, 12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<VariableGains> vars;
        for (int i = 0; i < 3; ++i) vars.push_back(make_variable(gain(rng), gain(rng)));
        const double g = 10 + trial;
        const BranchingInstance inst(vars, g);
        // With unlimited uses each gap has one choice, so one use per level is
        // enough to replay it: give every variable ceil(G / l) uses.
        std::vector<std::uint32_t> plenty(vars.size(), 1000);
        for (const auto& policy : {ScoringPolicy{SvtsPolicy{}}, ScoringPolicy{HybridPolicy{2, HeightEstimate::MinDepth}}}) {
            const auto expected = policy_tree(vars, plenty, g, policy);
            REQUIRE(expected);
            CHECK(simulate_policy_tree(inst, g, policy, exact_options()).exact_value() == *expected);
        }
    }
}

TEST_CASE("policy trees with multiplicities") {
    const BranchingInstance three({make_variable(1, 1), make_variable(2, 5), make_variable(3, 3)}, 6,
                                  std::vector<std::uint32_t>{1, 1, 1});
    for (const auto& policy : kAllPolicies) {
        CHECK(simulate_policy_tree(three, 6, policy, exact_options()).exact_value() >= 11);
    }
    const BranchingInstance single({make_variable(3, 3)}, 6, std::vector<std::uint32_t>{2});
    for (const auto& policy : kAllPolicies) {
        CHECK(simulate_policy_tree(single, 6, policy, exact_options()).exact_value() == 7);
    }
    const BranchingInstance short_path({make_variable(2, 5)}, 6, std::vector<std::uint32_t>{1});
    CHECK_THROWS_AS(simulate_policy_tree(short_path, 6, RatioPolicy{}), Error);
}

TEST_CASE("memoized policy trees equal explicit construction") {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> gain(1, 20);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<VariableGains> vars;
        for (int i = 0; i < 5; ++i) vars.push_back(make_variable(gain(rng), gain(rng)));
        const std::vector<std::uint32_t> mults(vars.size(), 1 + trial % 2);
        const double g = 15 + trial;
        const BranchingInstance inst(vars, g, mults);
        for (const auto& policy : kAllPolicies) {
            const auto expected = policy_tree(vars, mults, g, policy);
            if (!expected) {
                CHECK_THROWS_AS(simulate_policy_tree(inst, g, policy), Error);
                continue;
            }
            ++checked;
            const TreeSize fast = simulate_policy_tree(inst, g, policy, exact_options());
            CHECK(fast.exact_value() == *expected);
            CHECK(simulate_policy_tree_generic(inst, g, policy, exact_options()) == fast);
            CHECK(fast >= gvb_min_size(inst, g).size);
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("metrics") {
    const auto sizes = [](std::initializer_list<unsigned long> v) {
        std::vector<TreeSize> out;
        for (auto x : v) out.push_back(TreeSize::exact(x));
        return out;
    };
    const auto m = aggregate_metrics({{"c", sizes({100, 100, 100}), true}}, 0);
    CHECK(std::pow(10.0, m[0].geo_mean_log10) == doctest::Approx(100));
    CHECK(std::pow(10.0, m[0].shifted_geo_mean_100_log10) == doctest::Approx(100));
    CHECK(m[0].ts_percent == 0);

    const auto ab = aggregate_metrics({{"A", sizes({10, 1000}), true}, {"B", sizes({100, 100}), true}}, 1);
    CHECK(std::pow(10.0, ab[0].geo_mean_log10) == doctest::Approx(100));
    CHECK(ab[0].ts_percent == doctest::Approx(0).epsilon(1e-9));

    const auto wins = aggregate_metrics({{"A", sizes({9, 11}), true}, {"B", sizes({11, 9}), true}}, 0);
    CHECK(wins[0].wins == 1);
    CHECK(wins[1].wins == 1);

    const auto ties = aggregate_metrics(
        {{"A", sizes({5, 7}), true}, {"B", sizes({5, 9}), true}, {"ref", sizes({1, 1}), false}}, 2);
    CHECK(ties[0].wins == 2);
    CHECK(ties[1].wins == 1);
    CHECK(ties[2].wins == 0);
    CHECK(ties[0].ts_percent == doctest::Approx(100 * (std::sqrt(35.0) - 1)));

    CHECK(shifted_geometric_mean({100, 100, 100}, 10) == doctest::Approx(100));
    CHECK(shifted_geometric_mean({1, 100}, 0) == doctest::Approx(10));
    CHECK(shifted_geometric_mean({1, 100}, 10) == doctest::Approx(std::sqrt(11.0 * 110.0) - 10));
}

TEST_CASE("mvb experiment chain: optimum <= LB <= every policy") {
    MvbExperimentConfig cfg;
    cfg.n = 20;
    cfg.gap = 2000;
    cfg.instances = 4;
    cfg.exact = true;
    cfg.policies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}, SvtsPolicy{}, HybridPolicy{}};
    const ExperimentReport report = run_mvb_experiment(cfg);
    CHECK(report.groups.size() == 4);
    std::map<std::pair<char, std::uint64_t>, std::map<std::string, TreeSize>> by_instance;
    for (const auto& row : report.rows) by_instance[{data_type_code(row.data_type), row.instance_seed}][row.policy] = row.size;
    CHECK(by_instance.size() == 16);
    for (const auto& [key, sizes] : by_instance) {
        const TreeSize& opt = sizes.at(std::string(kOptimumSeries));
        const TreeSize& lb = sizes.at(std::string(kLowerBoundSeries));
        CHECK(opt <= lb);
        for (const auto& [name, size] : sizes) {
            if (name != kOptimumSeries && name != kLowerBoundSeries && name.rfind("svts", 0) && name.rfind("hybrid", 0)) {
                CHECK(lb <= size);
            }
            CHECK(opt <= size);
        }
    }
    for (const auto& group : report.groups) {
        std::size_t wins = 0;
        for (const auto& m : group.metrics) wins += m.wins;
        CHECK(wins >= cfg.instances);
        CHECK(group.metrics.back().ts_percent == 0);
    }
}

TEST_CASE("mvb experiment on single-variable instances") {
    MvbExperimentConfig cfg;
    cfg.n = 1;
    cfg.gap = 300;
    cfg.instances = 3;
    cfg.data_types = {DataType::Unbalanced};
    const ExperimentReport report = run_mvb_experiment(cfg);
    for (const auto& m : report.groups[0].metrics) CHECK(m.ts_percent == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("experiments are deterministic and independent of the thread count") {
    MvbExperimentConfig cfg;
    cfg.n = 30;
    cfg.gap = 3000;
    cfg.instances = 6;
    const auto a = run_mvb_experiment(cfg);
    cfg.jobs = 3;
    const auto b = run_mvb_experiment(cfg);
    CHECK(report_csv(a) == report_csv(b));
    CHECK(report_summary_json(a) == report_summary_json(b));

    GvbExperimentConfig g;
    g.n = 20;
    g.gaps = {300, 600};
    g.instances = 5;
    g.data_types = {DataType::VeryUnbalanced};
    const auto c = run_gvb_experiment(g);
    g.jobs = 4;
    const auto d = run_gvb_experiment(g);
    CHECK(report_csv(c) == report_csv(d));
    CHECK(report_summary_json(c) == report_summary_json(d));
}

TEST_CASE("gvb experiment sizes are odd and respect the leaf depth") {
    GvbExperimentConfig cfg;
    cfg.n = 15;
    cfg.gaps = {200, 400};
    cfg.instances = 5;
    cfg.exact = true;
    cfg.data_types = {DataType::ExtremelyUnbalanced};
    cfg.policies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}, SvtsPolicy{}, HybridPolicy{}};
    const ExperimentReport report = run_gvb_experiment(cfg);
    CHECK(report.rows.size() == 2 * 5 * 5);
    for (const auto& row : report.rows) {
        const auto inst = generate_instance(row.data_type, cfg.n, row.instance_seed);
        // Shallowest possible leaf: take the largest right gains first.
        std::vector<double> rights;
        for (const auto& v : inst.variables()) rights.push_back(v.right());
        std::sort(rights.rbegin(), rights.rend());
        long depth = 0;
        for (double closed = 0; closed < row.gap; closed += rights[depth]) ++depth;
        CHECK(mpz_odd_p(row.size.exact_value().get_mpz_t()));
        CHECK(row.size.exact_value() >= 2 * depth - 1);
    }
    const auto& m = report.groups[0].metrics;
    CHECK(report.groups[0].reference == "product");
    CHECK(m[1].ts_percent == 0);
}

TEST_CASE("gvb experiment replaces instances that cannot close the gap") {
    GvbExperimentConfig cfg;
    cfg.n = 3;
    cfg.gaps = {150};
    cfg.instances = 4;
    cfg.data_types = {DataType::ExtremelyUnbalanced};
    const ExperimentReport report = run_gvb_experiment(cfg);
    CHECK_FALSE(report.notes.empty());
    for (const auto& row : report.rows) {
        const auto inst = generate_instance(row.data_type, cfg.n, row.instance_seed);
        double reach = 0;
        for (const auto& v : inst.variables()) reach += v.left();
        CHECK(reach >= 150);
    }
}

TEST_CASE("approx sizes keep the exact ordering") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = generate_instance(DataType::VeryUnbalanced, 6, rng());
        const BranchingInstance with_mults(inst.variables(), 600, std::vector<std::uint32_t>(6, 2));
        std::vector<TreeSize> exact, approx;
        for (const auto& policy : {ScoringPolicy{ProductPolicy{}}, ScoringPolicy{RatioPolicy{}},
                                   ScoringPolicy{LinearPolicy{}}}) {
            try {
                exact.push_back(simulate_policy_tree(with_mults, 600, policy, exact_options()));
                approx.push_back(simulate_policy_tree(with_mults, 600, policy));
            } catch (const Error&) {
                break;
            }
        }
        for (std::size_t i = 0; i < exact.size(); ++i) {
            CHECK(approx[i].log10() == doctest::Approx(exact[i].log10()).epsilon(1e-10));
            for (std::size_t j = 0; j < exact.size(); ++j) {
                if (exact[i].exact_value() < exact[j].exact_value()) CHECK_FALSE(approx[j] < approx[i]);
            }
        }
    }
}

TEST_CASE("report serialization") {
    MvbExperimentConfig cfg;
    cfg.n = 5;
    cfg.gap = 100;
    cfg.instances = 2;
    cfg.data_types = {DataType::Balanced};
    const auto report = run_mvb_experiment(cfg);
    const std::string csv = report_csv(report);
    CHECK(csv.rfind("data_type,gap,instance_seed,policy,tree_size_mantissa,tree_size_exp10\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 5);
    const std::string json = report_summary_json(report);
    CHECK(json.find("\"optimal\"") != std::string::npos);
}
