#include "tbody/kernels.hpp"
#include "tbody/tensor_ops.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tbody;

namespace {

Mat random_points(Eigen::Index d, Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Mat m(d, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    return m;
}

template <Mat (*F)(const Mat&, double)>
void BM_extreme(benchmark::State& st) {
    const Mat V = random_points(st.range(0), st.range(1), 1);
    for (auto _ : st) benchmark::DoNotOptimize(F(V, 1e-9));
}

template <Vec (*F)(const Mat&, const Mat&, double)>
void BM_gauges(benchmark::State& st) {
    const Mat V = random_points(st.range(0), 4 * st.range(0), 2);
    const Mat X = random_points(st.range(0), st.range(1), 3);
    for (auto _ : st) benchmark::DoNotOptimize(F(V, X, 1e-9));
}

template <double (*F)(const Mat&, const Mat&, double)>
void BM_hull_dist(benchmark::State& st) {
    const Mat V = random_points(st.range(0), 3 * st.range(0), 4);
    const Mat X = 3.0 * random_points(st.range(0), st.range(1), 5);
    for (auto _ : st) benchmark::DoNotOptimize(F(X, V, 1e-9));
}

template <double (*F)(const std::vector<Mat>&, const Vec&)>
void BM_multilinear(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    std::vector<Mat> pts{random_points(3, n, 6), random_points(3, n, 7), random_points(3, n, 8)};
    const Vec u = random_points(27, 1, 9).col(0);
    for (auto _ : st) benchmark::DoNotOptimize(F(pts, u));
}

}  // namespace

BENCHMARK(BM_extreme<kernels::serial::extreme_columns>)->Name("extreme_columns/serial")->Args({9, 200})->Args({16, 400});
BENCHMARK(BM_extreme<kernels::parallel::extreme_columns>)->Name("extreme_columns/parallel")->Args({9, 200})->Args({16, 400});
BENCHMARK(BM_gauges<kernels::serial::gauges>)->Name("gauges/serial")->Args({9, 500});
BENCHMARK(BM_gauges<kernels::parallel::gauges>)->Name("gauges/parallel")->Args({9, 500});
BENCHMARK(BM_hull_dist<kernels::serial::max_dist_to_hull>)->Name("max_dist_to_hull/serial")->Args({8, 200});
BENCHMARK(BM_hull_dist<kernels::parallel::max_dist_to_hull>)->Name("max_dist_to_hull/parallel")->Args({8, 200});
BENCHMARK(BM_multilinear<kernels::serial::max_abs_multilinear>)->Name("max_abs_multilinear/serial")->Arg(40);
BENCHMARK(BM_multilinear<kernels::parallel::max_abs_multilinear>)->Name("max_abs_multilinear/parallel")->Arg(40);

BENCHMARK_MAIN();
