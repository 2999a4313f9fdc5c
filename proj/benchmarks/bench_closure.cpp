#include <benchmark/benchmark.h>

#include "aspec/constructions.hpp"
#include "aspec/groups.hpp"

using namespace aspec;

static void BM_CloseMillerMoreno(benchmark::State& state)
{
    auto [x, y] = miller_moreno(default_miller_moreno(3, state.range(0)));
    for (auto _ : state) {
        auto g = close({x, y});
        benchmark::DoNotOptimize(g.order());
    }
}
BENCHMARK(BM_CloseMillerMoreno)->Arg(7)->Arg(31)->Arg(151)->Unit(benchmark::kMillisecond);

static void BM_CloseWithCayley(benchmark::State& state)
{
    auto [x, y] = miller_moreno(default_miller_moreno(3, state.range(0)));
    for (auto _ : state) {
        auto g = close({x, y}, {.build_cayley = true});
        benchmark::DoNotOptimize(g.cayley());
    }
}
BENCHMARK(BM_CloseWithCayley)->Arg(31)->Arg(151)->Unit(benchmark::kMillisecond);

static void BM_CloseTadpoleRoots(benchmark::State& state)
{
    auto gens = tadpole_root_generators(3);
    for (auto _ : state) {
        auto g = close(gens);
        benchmark::DoNotOptimize(g.order());
    }
}
BENCHMARK(BM_CloseTadpoleRoots)->Unit(benchmark::kMillisecond);
