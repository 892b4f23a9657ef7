#include <benchmark/benchmark.h>

#include "isingtri/coefficients.hpp"
#include "isingtri/rng.hpp"
#include "isingtri/series_ops.hpp"

using namespace isingtri;

static void BM_SeriesMulDD(benchmark::State& state) {
    const std::size_t n = state.range(0);
    std::vector<dd> a(n), b(n);
    CounterRng rng(1, 2);
    for (auto& v : a) v = dd(rng.next_double() - 0.5);
    for (auto& v : b) v = dd(rng.next_double() - 0.5);
    for (auto _ : state) {
        auto c = fps_mul(a, b, n - 1);
        benchmark::DoNotOptimize(c[n / 2]);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_SeriesMulDD)->RangeMultiplier(4)->Range(1024, 65536)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_InvertParametrization(benchmark::State& state) {
    const std::size_t order = state.range(0);
    auto spec = coeffs::u_param(constants::nu_c());
    auto par = coeffs::u_param_as<dd>(spec);
    for (auto _ : state) {
        auto h = coeffs::invert_series<dd>(par, order);
        benchmark::DoNotOptimize(h[order]);
    }
}
BENCHMARK(BM_InvertParametrization)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
