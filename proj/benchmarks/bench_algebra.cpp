#include <benchmark/benchmark.h>
#include "defq/fedosov.hpp"
#include "defq/random_gen.hpp"

using namespace defq;

static void BM_Wedge(benchmark::State& state) {
    RandomGen g(1, 3, 6);
    FormSection a = g.rand_section(6), b = g.rand_section(6);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_Wedge);

BENCHMARK_MAIN();
