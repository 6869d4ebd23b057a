#include <benchmark/benchmark.h>

#include "qpoincare/models.hpp"
#include "qpoincare/qms.hpp"

using namespace qpoincare;

namespace {

void BM_BirthDeathModel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(birth_death(n, 1.0));
}

void BM_SpectralGap(benchmark::State& state) {
  const ModelSpec m = birth_death(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(m.context.generator, m.context.state));
}

void BM_SemigroupApply(benchmark::State& state) {
  const ModelSpec m = birth_death(static_cast<int>(state.range(0)), 1.0);
  const ComplexMatrix x = m.observables.begin()->second;
  for (auto _ : state) benchmark::DoNotOptimize(apply_semigroup(m.context.generator, x, 0.5));
}

}  // namespace

BENCHMARK(BM_BirthDeathModel)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_SpectralGap)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_SemigroupApply)->Arg(4)->Arg(8)->Arg(16);
