// Serial-versus-OpenMP timings for the two heavy kernels (tuple sweep and
// Monte Carlo trials) plus rank-update micro-benchmarks. The parallel and
// serial variants must produce identical results; test_parallel asserts that,
// this target only measures the speedup.

#include <benchmark/benchmark.h>

#include <vector>

#include "rlnc/bounds.hpp"
#include "rlnc/gf.hpp"
#include "rlnc/harness.hpp"
#include "rlnc/rng.hpp"
#include "rlnc/sim.hpp"

using namespace rlnc;

namespace {

CodeSpec code_of(int N, int K, std::int64_t q) {
    CodeSpec c;
    c.N = N;
    c.K = K;
    c.q = q;
    return c;
}

void bound_sweep(benchmark::State& state, SweepPath path, int threads) {
    const int L = int(state.range(0));
    const CodeSpec code = code_of(15, 5, 2);
    const NetworkSpec net = path == SweepPath::homogeneous
                                ? EpsSpec::scalar(0.05).resolve(L)
                                : heterogeneous_epsilons(L, 0.01, 0.1);
    std::uint64_t terms = 0;
    for (auto _ : state) {
        const BoundResult r = multicast_bound(code, net, path, threads);
        benchmark::DoNotOptimize(r.value);
        terms = r.terms_evaluated;
    }
    state.counters["terms"] = double(terms);
}

}  // namespace

static void BM_bound_order_free_serial(benchmark::State& state) {
    bound_sweep(state, SweepPath::order_free, 1);
}
static void BM_bound_order_free_parallel(benchmark::State& state) {
    bound_sweep(state, SweepPath::order_free, 0);
}
static void BM_bound_homogeneous_serial(benchmark::State& state) {
    bound_sweep(state, SweepPath::homogeneous, 1);
}
static void BM_bound_homogeneous_parallel(benchmark::State& state) {
    bound_sweep(state, SweepPath::homogeneous, 0);
}
BENCHMARK(BM_bound_order_free_serial)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(BM_bound_order_free_parallel)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(BM_bound_homogeneous_serial)->Arg(6)->Arg(10);
BENCHMARK(BM_bound_homogeneous_parallel)->Arg(6)->Arg(10);

namespace {

void sim_run(benchmark::State& state, int threads) {
    const CodeSpec code = code_of(12, 5, 2);
    NetworkSpec net;
    net.eps.assign(4, 0.1);
    SimOptions opts;
    opts.threads = threads;
    const std::int64_t trials = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_multicast(code, net, trials, 17, opts).mean);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

}  // namespace

static void BM_simulate_serial(benchmark::State& state) { sim_run(state, 1); }
static void BM_simulate_parallel(benchmark::State& state) { sim_run(state, 0); }
BENCHMARK(BM_simulate_serial)->Arg(20000);
BENCHMARK(BM_simulate_parallel)->Arg(20000);

static void BM_rank_gf2(benchmark::State& state) {
    const int rows = int(state.range(0)), cols = int(state.range(1));
    CounterRng rng(3, 0, 0);
    std::vector<std::uint64_t> data(rows);
    for (auto& r : data) r = rng.next_bits(cols);
    for (auto _ : state) {
        Gf2RankTracker tracker(cols);
        for (const auto r : data) tracker.add_row(r);
        benchmark::DoNotOptimize(tracker.rank());
    }
}
BENCHMARK(BM_rank_gf2)->Args({30, 20})->Args({64, 64});

static void BM_rank_gf256(benchmark::State& state) {
    const int rows = int(state.range(0)), cols = int(state.range(1));
    const Field f(8);
    CounterRng rng(3, 0, 0);
    std::vector<std::uint8_t> data(std::size_t(rows) * cols);
    for (auto& b : data) b = std::uint8_t(rng.next_bits(8));
    for (auto _ : state) {
        GfqRankTracker tracker(cols, f);
        for (int i = 0; i < rows; ++i) tracker.add_row(&data[std::size_t(i) * cols]);
        benchmark::DoNotOptimize(tracker.rank());
    }
}
BENCHMARK(BM_rank_gf256)->Args({10, 5})->Args({40, 30});

BENCHMARK_MAIN();
