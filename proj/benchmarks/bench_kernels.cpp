// Microbenchmarks pitting the parallel kernel fronts against their serial
// references. Build with -DCMAKE_BUILD_TYPE=Release and run manually; these
// are not part of the test suite.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "infogeo/kernels.hpp"
#include "infogeo/rng.hpp"

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    infogeo::NormalSampler rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.next();
    return m;
}

Eigen::MatrixXd random_graph(Eigen::Index n, std::uint64_t seed) {
    infogeo::NormalSampler rng(seed);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) g(i, j) = g(j, i) = 0.05 + std::abs(rng.next());
    return g;
}

void log_kernel_sums_parallel(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const Eigen::MatrixXd queries = gaussian_matrix(n, 3, 1);
    const Eigen::MatrixXd samples = gaussian_matrix(n, 3, 2);
    const Eigen::VectorXd inv_h = Eigen::VectorXd::Constant(3, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(infogeo::kernels::log_kernel_sums(queries, samples, inv_h));
}

void log_kernel_sums_serial(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const Eigen::MatrixXd queries = gaussian_matrix(n, 3, 1);
    const Eigen::MatrixXd samples = gaussian_matrix(n, 3, 2);
    const Eigen::VectorXd inv_h = Eigen::VectorXd::Constant(3, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            infogeo::kernels::serial::log_kernel_sums(queries, samples, inv_h));
}

void dijkstra_parallel(benchmark::State& state) {
    const Eigen::MatrixXd graph = random_graph(state.range(0), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(infogeo::kernels::dijkstra_all_pairs(graph));
}

void dijkstra_serial(benchmark::State& state) {
    const Eigen::MatrixXd graph = random_graph(state.range(0), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(infogeo::kernels::serial::dijkstra_all_pairs(graph));
}

}  // namespace

BENCHMARK(log_kernel_sums_parallel)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(log_kernel_sums_serial)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(dijkstra_parallel)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(dijkstra_serial)->Arg(64)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
