#include <benchmark/benchmark.h>

#include "qpoincare/inequalities.hpp"
#include "qpoincare/models.hpp"
#include "qpoincare/random.hpp"

using namespace qpoincare;

namespace {

void pi_bench(benchmark::State& state, PiMode mode, double beta) {
  const ModelSpec m = birth_death(static_cast<int>(state.range(0)), beta);
  PiOptions opts;
  opts.mode = mode;
  opts.p = LpExponent(4.0);
  Rng rng(5);
  const ComplexMatrix x = random_hermitian(rng, m.context.layout()).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(verify_pi(m.context, x, opts));
}

void BM_VerifyPiTracial(benchmark::State& state) { pi_bench(state, PiMode::tracial_sa, 0.0); }
void BM_VerifyPiHaagerup(benchmark::State& state) { pi_bench(state, PiMode::haagerup_sa, 1.0); }

void BM_Klein(benchmark::State& state) {
  Rng rng(9);
  const HermitianMatrix x = random_hermitian(rng, state.range(0));
  const HermitianMatrix y = random_hermitian(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(klein_check(x, y, 4.0));
}

}  // namespace

BENCHMARK(BM_VerifyPiTracial)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_VerifyPiHaagerup)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_Klein)->Arg(2)->Arg(8)->Arg(32);
