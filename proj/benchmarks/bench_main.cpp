#include <benchmark/benchmark.h>

#include "vqvi/exact.hpp"
#include "vqvi/sampling.hpp"
#include "vqvi/sparsified.hpp"
#include "vqvi/variance.hpp"
#include "vqvi/vrqvi.hpp"

using namespace vqvi;

namespace {

void BM_AliasDraw(benchmark::State& state) {
    const Dmdp mdp = generate_random({static_cast<std::size_t>(state.range(0)), 1, 0.9, 0.5, 1});
    GenerativeOracle oracle = build_oracle(mdp, 1);
    const std::uint64_t batch = 1 << 16;
    std::uint64_t sink = 0;
    for (auto _ : state) {
        oracle.for_each_sample(0, 0, batch, [&](std::size_t t) { sink += t; });
        benchmark::DoNotOptimize(sink);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
}
BENCHMARK(BM_AliasDraw)->Arg(8)->Arg(64)->Arg(1024);

void BM_BellmanApply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Dmdp mdp = generate_random({n, 4, 0.9, 0.5, 2});
    ValueVector v(n, 1.0);
    for (auto _ : state) {
        v = bellman_apply(mdp, v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * 4));
}
BENCHMARK(BM_BellmanApply)->Arg(16)->Arg(128);

void BM_PolicyEvaluation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Dmdp mdp = generate_random({n, 2, 0.9, 0.5, 3});
    const Policy pi(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(policy_evaluation(mdp, pi));
}
BENCHMARK(BM_PolicyEvaluation)->Arg(16)->Arg(128);

void BM_TotalVariance(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Dmdp mdp = generate_random({n, 2, 0.9, 0.5, 4});
    const Policy pi(n, 0);
    for (auto _ : state) benchmark::DoNotOptimize(total_variance(mdp, pi));
}
BENCHMARK(BM_TotalVariance)->Arg(16)->Arg(128);

void BM_HalfErr(benchmark::State& state) {
    const Dmdp mdp = generate_random({8, 3, 0.75, 0.5, 5});
    const VqviConstants consts{4.0, 8192.0, 128.0, 0.001};
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    for (auto _ : state) {
        GenerativeOracle oracle = build_oracle(mdp, seed++);
        const HalfErrResult res = half_err(oracle, ValueVector(8, 0.0), Policy(8, 0), 1.0, 0.1, consts);
        samples += res.diagnostics.samples;
        benchmark::DoNotOptimize(res.v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_HalfErr)->Unit(benchmark::kMillisecond);

void BM_Sparsify(benchmark::State& state) {
    const Dmdp mdp = generate_random({32, 4, 0.9, 0.5, 6});
    const auto m = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        GenerativeOracle oracle = build_oracle(mdp, seed++);
        benchmark::DoNotOptimize(sparsify(oracle, m).nnz());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 32 * 4 * m));
}
BENCHMARK(BM_Sparsify)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
