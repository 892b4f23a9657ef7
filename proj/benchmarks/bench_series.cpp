#include <benchmark/benchmark.h>

#include "isingtri/series_engine.hpp"

using namespace isingtri::series;

static void BM_ExtendTable(benchmark::State& state) {
    const std::size_t order = state.range(0);
    for (auto _ : state) {
        auto table = extend_table(PartitionTable(order), order);
        benchmark::DoNotOptimize(table.entry(1, 1, order > 2 ? order - 2 : 1));
    }
}
BENCHMARK(BM_ExtendTable)->Arg(8)->Arg(16)->Arg(24)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_MasterEquationCheck(benchmark::State& state) {
    const std::size_t order = state.range(0);
    auto table = extend_table(PartitionTable(order), order);
    for (auto _ : state) {
        auto rep = check_master_equation(table, order);
        benchmark::DoNotOptimize(rep.max_abs_eq_dobrushin);
    }
}
BENCHMARK(BM_MasterEquationCheck)->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
