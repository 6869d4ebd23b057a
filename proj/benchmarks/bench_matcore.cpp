#include <benchmark/benchmark.h>

#include <Eigen/Eigenvalues>

#include "qpoincare/matcore.hpp"
#include "qpoincare/random.hpp"

using namespace qpoincare;

namespace {

HermitianMatrix sample(Eigen::Index d) {
  Rng rng(static_cast<std::uint64_t>(d));
  return random_hermitian(rng, d);
}

void BM_JacobiEig(benchmark::State& state) {
  const HermitianMatrix a = sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eig(a));
}

void BM_HermEig(benchmark::State& state) {
  const HermitianMatrix a = sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(herm_eig(a));
}

void BM_EigenSelfAdjoint(benchmark::State& state) {
  const HermitianMatrix a = sample(state.range(0));
  for (auto _ : state) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
    benchmark::DoNotOptimize(es.eigenvalues());
  }
}

void BM_Schatten(benchmark::State& state) {
  Rng rng(3);
  const ComplexMatrix a = random_complex(rng, state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(schatten_norm(a, LpExponent(3.0), TraceMode::normalized));
}

}  // namespace

BENCHMARK(BM_JacobiEig)->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_HermEig)->RangeMultiplier(2)->Range(4, 128);
BENCHMARK(BM_EigenSelfAdjoint)->RangeMultiplier(2)->Range(4, 128);
BENCHMARK(BM_Schatten)->RangeMultiplier(2)->Range(4, 64);
