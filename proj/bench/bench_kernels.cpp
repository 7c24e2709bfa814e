// Serial reference vs OpenMP kernels for the per-sample contrast sums.
//
//   OMP_NUM_THREADS=4 ./build/bench/bench_kernels

#include "l1ica/kernels.hpp"
#include "l1ica/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using l1ica::Index;
using l1ica::Matrix;
using l1ica::Vector;

Matrix random_matrix(Index rows, Index cols)
{
    l1ica::Rng rng(7);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = rng.normal();
    return m;
}

template <auto Kernel>
void BM_ProjectionSums(benchmark::State& state)
{
    const Index K = 10;
    const Index N = state.range(0);
    const Matrix Z = random_matrix(K, N);
    const Vector w = Vector::Constant(K, 1.0 / std::sqrt(static_cast<double>(K)));
    for (auto _ : state) {
        auto sums = Kernel(Z, w);
        benchmark::DoNotOptimize(sums.g);
    }
    state.SetItemsProcessed(state.iterations() * N);
}

template <auto Kernel>
void BM_SumG(benchmark::State& state)
{
    const Matrix v = random_matrix(1, state.range(0));
    const std::span<const double> values(v.data(), static_cast<std::size_t>(v.size()));
    for (auto _ : state)
        benchmark::DoNotOptimize(Kernel(values));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_ProjectionSums<l1ica::kernels::serial::projection_sums>)->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_ProjectionSums<l1ica::kernels::parallel::projection_sums>)->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_SumG<l1ica::kernels::serial::sum_g>)->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_SumG<l1ica::kernels::parallel::sum_g>)->RangeMultiplier(8)->Range(512, 1 << 21);

BENCHMARK_MAIN();
