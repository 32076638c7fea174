// Serial reference vs OpenMP kernels. Thread count for the parallel variants
// comes from the benchmark argument; pass --benchmark_filter to pick a family.

#include <benchmark/benchmark.h>

#include <random>

#include "suge/dataset.hpp"
#include "suge/exec.hpp"
#include "suge/model.hpp"
#include "suge/neighbors.hpp"
#include "suge/pipeline.hpp"
#include "suge/uncertainty.hpp"

using namespace suge;

namespace {

Matrix random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) m(i, c) = g(rng);
    return m;
}

std::vector<std::int64_t> persons(std::size_t n, std::int64_t groups) {
    std::vector<std::int64_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::int64_t>(i) % groups;
    return p;
}

int max_threads() { return std::max(1, default_thread_count()); }

void knn_exhaustive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix f = random_features(n, 16, 1);
    const auto p = persons(n, 8);
    for (auto _ : state) benchmark::DoNotOptimize(knn_same_person_exhaustive(f, p, 4));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void knn_kdtree(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ExecPolicy exec{static_cast<int>(state.range(1))};
    const Matrix f = random_features(n, 16, 1);
    const auto p = persons(n, 8);
    for (auto _ : state) benchmark::DoNotOptimize(knn_same_person(f, p, 4, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void neighbor_sets(benchmark::State& state) {
    const ExecPolicy exec{static_cast<int>(state.range(0))};
    const Matrix f = random_features(4000, 16, 2);
    const auto p = persons(4000, 8);
    for (auto _ : state) benchmark::DoNotOptimize(build_neighbor_sets(f, p, {}, NeighborWeighting::reconstruction, exec));
}

void confidences(benchmark::State& state) {
    const ExecPolicy exec{static_cast<int>(state.range(0))};
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> e(0.5);
    std::vector<double> a(4000), b(4000);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = e(rng), b[i] = e(rng);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_confidences(a, b, {}, exec));
}

void epoch_pass_threads(benchmark::State& state) {
    static const Dataset ds = generate_synthetic(4000, 8, 24, NoiseSpec{}, 4);
    TrainConfig cfg;
    cfg.threads = static_cast<int>(state.range(0));
    const Mlp net(cfg.network_config(ds.input_dim, 0));
    for (auto _ : state) benchmark::DoNotOptimize(epoch_pass(ds, net, cfg));
}

void thread_args(benchmark::internal::Benchmark* b) {
    b->Arg(1);
    if (max_threads() > 1) b->Arg(max_threads());
}

void knn_args(benchmark::internal::Benchmark* b) {
    for (int n : {1000, 4000}) {
        b->Args({n, 1});
        if (max_threads() > 1) b->Args({n, max_threads()});
    }
}

}  // namespace

BENCHMARK(knn_exhaustive)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(knn_kdtree)->Apply(knn_args)->Unit(benchmark::kMillisecond);
BENCHMARK(neighbor_sets)->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK(confidences)->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK(epoch_pass_threads)->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
