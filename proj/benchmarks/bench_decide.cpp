#include <benchmark/benchmark.h>

#include "luequiv/decider.hpp"
#include "luequiv/testkit.hpp"

using namespace luequiv;

namespace {

DensityMatrix state(Index n, int rank) { return testkit::random_density(n, rank, std::nullopt, 17); }

void BM_Fingerprint(benchmark::State& st) {
    const auto rho = state(st.range(0), static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(fingerprint(rho));
}

void BM_SpectralDecompose(benchmark::State& st) {
    const auto rho = state(st.range(0), static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(spectral_decompose(rho));
}

void BM_BuildAlgebra(benchmark::State& st) {
    const auto spec = spectral_decompose(state(st.range(0), static_cast<int>(st.range(1))));
    for (auto _ : st) benchmark::DoNotOptimize(build_algebra(spec, Side::Left));
}

void BM_DecideOrbitPair(benchmark::State& st) {
    const Index n = st.range(0);
    const auto rho = state(n, static_cast<int>(st.range(1)));
    const auto image = apply_local_unitary(rho, testkit::haar_unitary(n, 1), testkit::haar_unitary(n, 2));
    for (auto _ : st) benchmark::DoNotOptimize(decide(rho, image));
}

void BM_DecideInequivalent(benchmark::State& st) {
    const Index n = st.range(0);
    const auto a = state(n, static_cast<int>(st.range(1)));
    const auto b = testkit::random_density(n, static_cast<int>(st.range(1)), std::nullopt, 18);
    for (auto _ : st) benchmark::DoNotOptimize(decide(a, b));
}

void BM_Oracle(benchmark::State& st) {
    const auto rho = state(2, 4);
    const auto image = apply_local_unitary(rho, testkit::haar_unitary(2, 1), testkit::haar_unitary(2, 2));
    for (auto _ : st) benchmark::DoNotOptimize(testkit::brute_force_oracle(rho, image));
}

}  // namespace

BENCHMARK(BM_Fingerprint)->Args({2, 4})->Args({3, 3})->Args({3, 9})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralDecompose)->Args({2, 4})->Args({3, 9})->Args({4, 16});
BENCHMARK(BM_BuildAlgebra)->Args({2, 4})->Args({3, 9})->Args({4, 16});
BENCHMARK(BM_DecideOrbitPair)->Args({2, 4})->Args({3, 3})->Args({3, 9})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecideInequivalent)->Args({2, 4})->Args({3, 9})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
