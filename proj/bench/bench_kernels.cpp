// Serial vs OpenMP timings for the kernels that have a parallel path, plus
// the (sequential) two-marginal coupling for scale.
//
//   ./build/bench/mec_bench --benchmark_filter=KWay
//   OMP_NUM_THREADS=4 ./build/bench/mec_bench

#include <benchmark/benchmark.h>

#include <vector>

#include "mec/coupling2.hpp"
#include "mec/coupling_k.hpp"
#include "mec/oracle.hpp"
#include "support/generators.hpp"

namespace {

std::vector<mec::ProbVec> marginals(std::size_t k, std::size_t n) {
    mec::testing::Rng rng(k * 1000 + n);
    std::vector<mec::ProbVec> ps;
    for (std::size_t i = 0; i < k; ++i)
        ps.push_back(mec::testing::random_probvec(rng, n));
    return ps;
}

template <mec::Execution E>
void BM_KWay(benchmark::State& state) {
    const auto ps = marginals(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        auto joint = mec::k_min_entropy_coupling(ps, {}, E);
        benchmark::DoNotOptimize(joint.values.data());
    }
    state.counters["k"] = static_cast<double>(state.range(0));
}

template <mec::Execution E>
void BM_Oracle(benchmark::State& state) {
    const auto ps = marginals(2, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto vs = mec::enumerate_vertices(ps[0], ps[1], {}, E);
        benchmark::DoNotOptimize(vs.data());
    }
}

void BM_Couple(benchmark::State& state) {
    const auto ps = marginals(2, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto m = mec::min_entropy_coupling(ps[0], ps[1]);
        benchmark::DoNotOptimize(m.cells.data());
    }
    state.SetComplexityN(state.range(0));
}

} // namespace

BENCHMARK_TEMPLATE(BM_KWay, mec::Execution::serial)
    ->ArgsProduct({{16, 64, 256}, {64, 512}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_KWay, mec::Execution::parallel)
    ->ArgsProduct({{16, 64, 256}, {64, 512}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_TEMPLATE(BM_Oracle, mec::Execution::serial)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Oracle, mec::Execution::parallel)
    ->DenseRange(3, 5)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Couple)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity();

BENCHMARK_MAIN();
