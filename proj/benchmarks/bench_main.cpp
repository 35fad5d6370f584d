#include <benchmark/benchmark.h>

#include "branchlab/multivar.hpp"
#include "branchlab/scoring.hpp"
#include "branchlab/sim.hpp"
#include "branchlab/svb.hpp"

using namespace branchlab;

namespace {

void BM_SvbRecurrence(benchmark::State& state) {
    const auto v = make_variable(2, 49);
    const double gap = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(svb_size_recurrence(v, gap));
}
BENCHMARK(BM_SvbRecurrence)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_SvbRecurrenceApprox(benchmark::State& state) {
    const auto v = make_variable(2, 49);
    SizeOptions approx;
    approx.arithmetic = Arithmetic::Approx;
    for (auto _ : state) benchmark::DoNotOptimize(svb_size_recurrence(v, 100000, approx));
}
BENCHMARK(BM_SvbRecurrenceApprox);

void BM_SvbClosedForm(benchmark::State& state) {
    const auto v = make_variable(2, 49);
    const double gap = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(svb_size_closed_form(v, gap));
}
BENCHMARK(BM_SvbClosedForm)->Arg(1000)->Arg(10000);

void BM_Ratio(benchmark::State& state) {
    const auto method = static_cast<RatioMethod>(state.range(0));
    RatioOptions opt;
    opt.method = method;
    const auto v = make_variable(3, 13);
    state.SetLabel(std::string(ratio_method_name(method)));
    for (auto _ : state) benchmark::DoNotOptimize(svb_ratio(v, opt));
}
BENCHMARK(BM_Ratio)->DenseRange(0, 4);

void BM_MvbMinSize(benchmark::State& state) {
    const auto generated = generate_instance(DataType::VeryUnbalanced, 100, 1);
    const BranchingInstance inst(generated.variables(), static_cast<double>(state.range(0)));
    SizeOptions approx;
    approx.arithmetic = Arithmetic::Approx;
    for (auto _ : state) benchmark::DoNotOptimize(mvb_min_size(inst, inst.gap(), approx));
}
BENCHMARK(BM_MvbMinSize)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SelectRatio(benchmark::State& state) {
    const auto inst = generate_instance(DataType::ExtremelyUnbalanced, static_cast<std::size_t>(state.range(0)), 2);
    SelectionContext ctx;
    ctx.candidates = inst.variables();
    for (auto _ : state) benchmark::DoNotOptimize(select_ratio(ctx));
}
BENCHMARK(BM_SelectRatio)->Arg(10)->Arg(100)->Arg(1000);

void BM_SelectSvts(benchmark::State& state) {
    const auto inst = generate_instance(DataType::ExtremelyUnbalanced, 100, 3);
    SelectionContext ctx;
    ctx.candidates = inst.variables();
    ctx.gap = 4000;
    for (auto _ : state) benchmark::DoNotOptimize(select_svts(ctx));
}
BENCHMARK(BM_SelectSvts)->Unit(benchmark::kMillisecond);

void BM_GvbPolicyTree(benchmark::State& state) {
    const auto generated = generate_instance(DataType::ExtremelyUnbalanced, 100, 4);
    const BranchingInstance inst(generated.variables(), 2000, std::vector<std::uint32_t>(100, 1));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_policy_tree(inst, 2000, RatioPolicy{}));
}
BENCHMARK(BM_GvbPolicyTree)->Unit(benchmark::kMillisecond);

void BM_KnapsackGvb(benchmark::State& state) {
    const std::vector<std::uint64_t> w{12, 7, 33, 41, 5, 19, 28, 9};
    const auto inst = knapsack_to_gvb(w, 80);
    for (auto _ : state) benchmark::DoNotOptimize(gvb_min_size(inst, inst.gap()));
}
BENCHMARK(BM_KnapsackGvb)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
