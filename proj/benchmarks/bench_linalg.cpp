#include <benchmark/benchmark.h>

#include <random>

#include "qnpg/linalg.hpp"
#include "qnpg/tensor.hpp"

using namespace qnpg;

namespace {

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  return m;
}

SymMatrix random_spd(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXd a = random_matrix(n, rng);
  return SymMatrix(a * a.transpose() + Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

static void BM_tensor_vec_product(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor3 t(n, n, 2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(i, j, k) = dist(rng);
  Eigen::VectorXd v(2);
  v << 0.3, -0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tensor_vec_product(t, v));
  }
}

static void BM_solve_spd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(42);
  const SymMatrix a = random_spd(n, rng);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_spd(a, b));
  }
}

static void BM_min_eigenvalue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(42);
  const SymMatrix a = random_spd(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_eigenvalue(a));
  }
}

BENCHMARK(BM_tensor_vec_product)->Arg(1)->Arg(4)->Arg(16);
BENCHMARK(BM_solve_spd)->Arg(1)->Arg(2)->Arg(4)->Arg(16);
BENCHMARK(BM_min_eigenvalue)->Arg(1)->Arg(2)->Arg(4)->Arg(16);

BENCHMARK_MAIN();
