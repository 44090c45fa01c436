// Serial reference kernels against the OpenMP versions, plus one full
// likelihood-and-gradient evaluation. Run with OMP_NUM_THREADS to vary threads.
#include <benchmark/benchmark.h>

#include "ukrig/design.hpp"
#include "ukrig/gp.hpp"
#include "ukrig/kernel.hpp"
#include "ukrig/trend.hpp"

using namespace ukrig;

namespace {

struct Setup {
  Eigen::MatrixXd U;
  Eigen::VectorXd y;
  HyperParams hp;
};

Setup setup(int n, int p) {
  Rng rng(42);
  Setup s;
  s.U = maximin_lhs(n, p, rng, 100).points;
  s.y = s.U.rowwise().sum().array().sin();
  s.hp = HyperParams{1.0, Eigen::VectorXd::Constant(p, 0.5 * std::sqrt(p)), 1e-3};
  return s;
}

void BM_KernelMatrix(benchmark::State& st) {
  const Setup s = setup(static_cast<int>(st.range(0)), 8);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_matrix(s.hp, s.U));
}

void BM_KernelMatrixReference(benchmark::State& st) {
  const Setup s = setup(static_cast<int>(st.range(0)), 8);
  for (auto _ : st) benchmark::DoNotOptimize(reference::kernel_matrix(s.hp, s.U));
}

void BM_ContractGrad(benchmark::State& st) {
  const Setup s = setup(static_cast<int>(st.range(0)), 8);
  const Eigen::MatrixXd B = kernel_matrix(s.hp, s.U);
  for (auto _ : st) benchmark::DoNotOptimize(contract_kernel_grad(s.hp, s.U, B));
}

void BM_ContractGradReference(benchmark::State& st) {
  const Setup s = setup(static_cast<int>(st.range(0)), 8);
  const Eigen::MatrixXd B = kernel_matrix(s.hp, s.U);
  for (auto _ : st) benchmark::DoNotOptimize(reference::contract_kernel_grad(s.hp, s.U, B));
}

void BM_LmlGradUniversal(benchmark::State& st) {
  const int p = static_cast<int>(st.range(1));
  const Setup s = setup(static_cast<int>(st.range(0)), p);
  const Eigen::MatrixXd H = basis_eval({TrendKind::quadratic, p}, nullptr, s.U);
  for (auto _ : st) benchmark::DoNotOptimize(lml_grad_universal(s.hp, s.U, s.y, H));
}

void BM_LmlUniversal(benchmark::State& st) {
  const int p = static_cast<int>(st.range(1));
  const Setup s = setup(static_cast<int>(st.range(0)), p);
  const Eigen::MatrixXd H = basis_eval({TrendKind::quadratic, p}, nullptr, s.U);
  for (auto _ : st) benchmark::DoNotOptimize(lml_universal(s.hp, s.U, s.y, H));
}

}  // namespace

BENCHMARK(BM_KernelMatrix)->Arg(80)->Arg(400)->Arg(1000);
BENCHMARK(BM_KernelMatrixReference)->Arg(80)->Arg(400)->Arg(1000);
BENCHMARK(BM_ContractGrad)->Arg(80)->Arg(400)->Arg(1000);
BENCHMARK(BM_ContractGradReference)->Arg(80)->Arg(400)->Arg(1000);
BENCHMARK(BM_LmlGradUniversal)->Args({80, 8})->Args({90, 9})->Args({400, 8});
BENCHMARK(BM_LmlUniversal)->Args({80, 8})->Args({90, 9})->Args({400, 8});

BENCHMARK_MAIN();
