#include <benchmark/benchmark.h>

#include "isingtri/coefficients.hpp"
#include "isingtri/constants.hpp"
#include "isingtri/peeling.hpp"

using namespace isingtri;

namespace {

const peel::PeelingContext& bench_ctx() {
    static const peel::PeelingContext ctx = [] {
        coeffs::BuildOptions opt;
        opt.k_max = 8192;
        opt.zeta_size = 96;
        opt.grid_points = 512;
        opt.radius = 0.92;
        opt.radius_check = -1;
        return peel::PeelingContext(
            coeffs::load_or_build(constants::nu_c(), opt, coeffs::default_cache_dir()));
    }();
    return ctx;
}

} // namespace

static void BM_InfiniteDraw(benchmark::State& state) {
    const auto& ctx = bench_ctx();
    peel::InfiniteSampler s(ctx, false);
    CounterRng rng(7, 7);
    for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng).k);
}
BENCHMARK(BM_InfiniteDraw);

static void BM_HalfplaneDraw(benchmark::State& state) {
    const auto& ctx = bench_ctx();
    peel::HalfplaneSampler s(ctx);
    CounterRng rng(7, 8);
    std::int64_t p = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng, p).k);
}
BENCHMARK(BM_HalfplaneDraw)->Arg(20)->Arg(200)->Arg(2000);

static void BM_FiniteDraw(benchmark::State& state) {
    const auto& ctx = bench_ctx();
    peel::FiniteSampler s(ctx);
    CounterRng rng(7, 9);
    std::int64_t p = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng, p, p).k);
}
BENCHMARK(BM_FiniteDraw)->Arg(10)->Arg(60);
