#include <benchmark/benchmark.h>

#include "aspec/constructions.hpp"
#include "aspec/linalg.hpp"

using namespace aspec;

namespace {

std::vector<UnitPoint> det_one_weights(std::int64_t p)
{
    std::vector<UnitPoint> w;
    UnitPoint prod;
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        w.push_back(UnitPoint::approx(0.137 * static_cast<double>(i + 1)));
        prod = prod * w.back();
    }
    w.push_back(prod.inverse());
    return w;
}

} // namespace

static void BM_SpectrumDck(benchmark::State& state)
{
    auto p = state.range(0);
    auto w = det_one_weights(p);
    for (auto _ : state)
        benchmark::DoNotOptimize(spectrum_dck(w, 1, p).points.size());
}
BENCHMARK(BM_SpectrumDck)->Arg(3)->Arg(11)->Arg(31);

static void BM_SpectrumStructured(benchmark::State& state)
{
    auto p = state.range(0);
    auto m = UMatrix::monomial_cycle(det_one_weights(p), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(spectrum(m).points.size());
}
BENCHMARK(BM_SpectrumStructured)->Arg(3)->Arg(11)->Arg(31);

static void BM_EigensolveDense(benchmark::State& state)
{
    auto p = state.range(0);
    ComplexMatrix m = UMatrix::monomial_cycle(det_one_weights(p), 1).to_dense();
    for (auto _ : state)
        benchmark::DoNotOptimize(eigensolve_dense(m).values.size());
}
BENCHMARK(BM_EigensolveDense)->Arg(3)->Arg(11)->Arg(31);
