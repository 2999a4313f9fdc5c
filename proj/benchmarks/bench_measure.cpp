#include <benchmark/benchmark.h>

#include "aspec/constructions.hpp"
#include "aspec/groups.hpp"
#include "aspec/measure.hpp"

using namespace aspec;

static void BM_MeasureMillerMoreno(benchmark::State& state)
{
    auto [x, y] = miller_moreno(default_miller_moreno(3, state.range(0)));
    auto g = close({x, y}, {.build_cayley = true});
    for (auto _ : state)
        benchmark::DoNotOptimize(measure_asm(g).epsilon_star.value);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.order() * g.order()));
}
BENCHMARK(BM_MeasureMillerMoreno)->Arg(7)->Arg(31)->Arg(151)->Unit(benchmark::kMillisecond);

static void BM_TadpoleSampled(benchmark::State& state)
{
    auto sampler = tadpole_pair_sampler(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(measure_asm_sampled(sampler, 1000, 1).epsilon_star.value);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_TadpoleSampled)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_SrSampled(benchmark::State& state)
{
    auto how = state.range(0) ? SrEigen::Numeric : SrEigen::ClosedForm;
    auto sampler = sr_pair_sampler({.n = 3, .r = 0.5}, how);
    for (auto _ : state)
        benchmark::DoNotOptimize(measure_sub_sampled(sampler, 1000, 1).epsilon_star.value);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SrSampled)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
