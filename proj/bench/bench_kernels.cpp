// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the
// thread count.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "covergen/kernels.hpp"

namespace k = covergen::kernels;

namespace {

std::vector<double> random_matrix(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = n(rng);
  return v;
}

std::vector<double> random_probs(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < cols; ++c) s += v[r * cols + c] = u(rng);
    for (std::size_t c = 0; c < cols; ++c) v[r * cols + c] /= s;
  }
  return v;
}

template <auto Kernel>
void BM_column_moments(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 64;
  const auto x = random_matrix(rows, cols);
  std::vector<double> mean(cols), cov(cols * cols);
  for (auto _ : state) {
    Kernel(k::ConstMatrixView{x, rows, cols}, mean, k::MatrixView{cov, cols, cols});
    benchmark::DoNotOptimize(cov.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

template <auto Kernel>
void BM_row_kl(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 100;
  const auto p = random_probs(rows, cols);
  std::vector<double> marginal(cols, 1.0 / cols), kl(rows);
  for (auto _ : state) {
    Kernel(k::ConstMatrixView{p, rows, cols}, marginal, kl);
    benchmark::DoNotOptimize(kl.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

template <auto Kernel>
void BM_add_noise(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint8_t> in(side * side * 3, 128), out(in.size());
  for (auto _ : state) {
    Kernel(in, out, 0.1, 7);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

template <auto Kernel>
void BM_render_cover(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto layout = k::make_cover_layout(42, 12, side, side);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(side) * side * 3);
  for (auto _ : state) {
    Kernel(layout, side, side, rgb);
    benchmark::DoNotOptimize(rgb.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(rgb.size()));
}

}  // namespace

BENCHMARK(BM_column_moments<k::serial::column_moments>)->Name("column_moments/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_column_moments<k::parallel::column_moments>)->Name("column_moments/openmp")->Arg(1000)->Arg(10000);
BENCHMARK(BM_row_kl<k::serial::row_kl_to>)->Name("row_kl/serial")->Arg(1000)->Arg(50000);
BENCHMARK(BM_row_kl<k::parallel::row_kl_to>)->Name("row_kl/openmp")->Arg(1000)->Arg(50000);
BENCHMARK(BM_add_noise<k::serial::add_noise>)->Name("add_noise/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_add_noise<k::parallel::add_noise>)->Name("add_noise/openmp")->Arg(256)->Arg(1024);
BENCHMARK(BM_render_cover<k::serial::render_cover>)->Name("render_cover/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_render_cover<k::parallel::render_cover>)->Name("render_cover/openmp")->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
