#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpoincare/errors.hpp"
#include "qpoincare/models.hpp"
#include "qpoincare/qms.hpp"
#include "qpoincare/random.hpp"

using namespace qpoincare;

namespace {

std::vector<JumpTerm> to_terms(const std::vector<oracle::Jump>& jumps) {
  std::vector<JumpTerm> t;
  for (const auto& [c, w] : jumps) t.emplace_back(c, w);
  return t;
}

}  // namespace

TEST(Gksl, TwoLevelByHand) {
  for (double beta : {0.0, 0.7}) {
    const Generator l = gksl_generator(to_terms(oracle::birth_death_jumps(2, beta)), 2);
    const ComplexMatrix e12 = oracle::unit(2, 0, 1);
    EXPECT_LT((l.apply(e12) - 2 * std::cosh(beta / 2) * e12).norm(), 1e-14);
  }
  const Generator l0 = gksl_generator(to_terms(oracle::birth_death_jumps(2, 0.0)), 2);
  ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
  diag(0, 0) = 1;
  diag(1, 1) = -1;
  EXPECT_LT((l0.apply(diag) - 4.0 * diag).norm(), 1e-14);
  EXPECT_LT(l0.apply(ComplexMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Gksl, SuperopMatchesLiteralFormula) {
  Rng rng(1);
  std::vector<oracle::Jump> jumps;
  for (int k = 0; k < 3; ++k) jumps.emplace_back(random_complex(rng, 3, 3), 0.3 + k);
  const Generator l = gksl_generator(to_terms(jumps), 3);
  const ComplexMatrix ref = oracle::superop([&](const ComplexMatrix& x) { return oracle::lindblad(jumps, x); }, 3);
  EXPECT_LT((l.superop() - ref).norm(), 1e-12 * ref.norm());
  const GeneratorInvariants& inv = l.invariants();
  EXPECT_LT(inv.unitality, 1e-10);
  EXPECT_LT(inv.hermiticity, 1e-10);
  EXPECT_LT(inv.conditional_positivity, 1e-9);
}

TEST(Gksl, EmptyIsZero) {
  const Generator l = gksl_generator({}, 3);
  Rng rng(2);
  EXPECT_LT(l.apply(random_complex(rng, 3, 3)).norm(), 1e-15);
}

TEST(Gksl, RejectsNonpositiveWeight) {
  EXPECT_THROW(JumpTerm(oracle::unit(2, 0, 1), 0.0), DomainError);
}

TEST(Projection, IdentityAndDepolarizing) {
  Rng rng(3);
  const DensityState d(random_density(rng, 3));
  const Generator z = projection_generator(ConditionalExpectation::identity(d));
  EXPECT_LT(z.superop().norm(), 1e-12);
  for (int dim : {2, 3, 4}) {
    const ModelSpec m = depolarizing(dim);
    EXPECT_NEAR(m.context.alpha(), 1.0, 1e-12);
    EXPECT_EQ(m.context.analysis.gap.kernel_dim, 1);
  }
}

TEST(Semigroup, BasicLaws) {
  const ModelSpec dep = depolarizing(3);
  Rng rng(4);
  ComplexMatrix x = random_complex(rng, 3, 3);
  EXPECT_LT((apply_semigroup(dep.context.generator, x, 0.0) - x).norm(), 1e-14);
  x -= (x.trace() / 3.0) * ComplexMatrix::Identity(3, 3);
  EXPECT_LT((apply_semigroup(dep.context.generator, x, 0.8) - std::exp(-0.8) * x).norm(), 1e-12);
  EXPECT_THROW(apply_semigroup(dep.context.generator, x, -1.0), DomainError);

  const ModelSpec bd = birth_death(4, 1.0);
  const Generator& l = bd.context.generator;
  for (int s = 0; s < 5; ++s) {
    const ComplexMatrix y = random_complex(rng, 4, 4);
    for (double a : {0.1, 0.7})
      for (double b : {0.1, 0.7}) {
        const ComplexMatrix lhs = apply_semigroup(l, y, a + b);
        EXPECT_LT((lhs - apply_semigroup(l, apply_semigroup(l, y, b), a)).norm(), 1e-9);
      }
    EXPECT_LT(std::abs(bd.context.state.expect(apply_semigroup(l, y, 0.6)) - bd.context.state.expect(y)), 1e-9);
  }
}

TEST(Semigroup, PositivityPreserving) {
  const ModelSpec m = birth_death(3, 0.5);
  Rng rng(5);
  for (int s = 0; s < 50; ++s) {
    const HermitianMatrix p = random_positive(rng, m.context.layout());
    const ComplexMatrix t = apply_semigroup(m.context.generator, p.matrix(), 0.4);
    EXPECT_GE(oracle::hermitian_eigenvalues((t + t.adjoint()) / 2.0).minCoeff(), -1e-9);
  }
}

TEST(Semigroup, GnsDecay) {
  const ModelSpec m = birth_death(4, 1.0);
  const auto& ctx = m.context;
  Rng rng(6);
  const InnerProductForm f = ctx.state.gns();
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix x = random_complex(rng, 4, 4);
    const ComplexMatrix c = x - ctx.expectation().apply(x);
    for (double t : {0.3, 1.0, 2.0}) {
      const ComplexMatrix tc = apply_semigroup(ctx.generator, x, t) - ctx.expectation().apply(x);
      EXPECT_LE(std::sqrt(inner_product(tc, tc, f).real()),
                std::exp(-ctx.alpha() * t) * std::sqrt(inner_product(c, c, f).real()) * (1 + 1e-9));
    }
  }
  // The eigen-element decays at exactly α.
  const ComplexMatrix w = ctx.analysis.witness;
  const ComplexMatrix tw = apply_semigroup(ctx.generator, w, 1.5);
  EXPECT_LT((tw - std::exp(-1.5 * ctx.alpha()) * w).norm(), 1e-8);
}

TEST(Symmetry, TauResiduals) {
  EXPECT_LT(check_tau_symmetry(birth_death(4, 0.0).context.generator), 1e-12);
  EXPECT_LT(check_tau_symmetry(depolarizing(3).context.generator), 1e-12);
  EXPECT_GT(check_tau_symmetry(birth_death(4, 1.0).context.generator), 0.1);
}

TEST(Symmetry, DetailedBalanceOfThermalChain) {
  for (int n = 2; n <= 10; ++n)
    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
      const ModelSpec m = birth_death(n, beta);
      EXPECT_LT(check_gns_db(m.context.generator, m.context.state), 1e-10);
      EXPECT_LT(check_kms_db(m.context.generator, m.context.state), 1e-10);
      const ComplexMatrix expected = oracle::thermal_state(n, beta);
      EXPECT_LT((m.context.state.matrix() - expected).norm(), 1e-12);
    }
}

TEST(Symmetry, TracialCollapse) {
  Rng rng(7);
  std::vector<oracle::Jump> jumps;
  for (int k = 0; k < 2; ++k) jumps.emplace_back(random_complex(rng, 3, 3), 1.0);
  const Generator l = gksl_generator(to_terms(jumps), 3);
  const DensityState t = DensityState::tracial(BlockLayout::full(3));
  const double tau = check_tau_symmetry(l);
  EXPECT_GT(tau, 1e-3);
  EXPECT_GT(check_kms_db(l, t), 1e-3);
  EXPECT_GT(check_gns_db(l, t), 1e-3);
  const Generator sym = birth_death(3, 0.0).context.generator;
  EXPECT_LT(check_kms_db(sym, t), 1e-12);
  EXPECT_LT(check_gns_db(sym, t), 1e-12);
}

TEST(Symmetry, PerturbedJumpsBreakDetailedBalance) {
  auto jumps = oracle::birth_death_jumps(3, 1.0);
  jumps[0].second *= 1.5;
  const Generator l = gksl_generator(to_terms(jumps), 3);
  const DensityState d(HermitianMatrix(oracle::thermal_state(3, 1.0)));
  EXPECT_GT(check_kms_db(l, d), 1e-3);
  EXPECT_GT(check_gns_db(l, d), 1e-3);
}

TEST(Symmetry, KmsOnlyModelFailsCommutation) {
  Rng rng(8);
  const DensityState d(random_density(rng, 3));
  const ModelSpec m = kms_only_counterexample(d, 3);
  EXPECT_LT(check_kms_db(m.context.generator, m.context.state), 1e-10);
  EXPECT_GT(gns_report(m.context.generator, m.context.state).commutation, 1e-3);
}

TEST(Gap, TwoLevelChainAgainstOracle) {
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    const ModelSpec m = birth_death(2, beta);
    EXPECT_NEAR(m.context.alpha(), 2 * std::cosh(beta / 2), 1e-9);
    const auto jumps = oracle::birth_death_jumps(2, beta);
    const ComplexMatrix s = oracle::superop([&](const ComplexMatrix& x) { return oracle::lindblad(jumps, x); }, 2);
    // The 4×4 superoperator of M_2 and its square lift on M_2 ⊗ M_2.
    EXPECT_NEAR(oracle::gap(s), 2 * std::cosh(beta / 2), 1e-9);
    const ComplexMatrix lifted = oracle::kron(s, ComplexMatrix::Identity(4, 4)) +
                                 oracle::kron(ComplexMatrix::Identity(4, 4), s);
    EXPECT_NEAR(oracle::gap(lifted), 2 * std::cosh(beta / 2), 1e-9);
  }
}

TEST(Gap, AgreesWithGeneralEigensolver) {
  for (const ModelSpec& m : {birth_death(4, 1.0), birth_death(5, 0.3), depolarizing(3)}) {
    EXPECT_NEAR(m.context.alpha(), oracle::gap(m.context.generator.superop()), 1e-9) << m.name;
    const RealVector& spec = m.context.analysis.gap.spectrum;
    EXPECT_GE(spec.minCoeff(), -1e-9);
  }
}

TEST(Gap, ZeroGeneratorHasInfiniteGap) {
  const Generator z = zero_generator(BlockLayout::full(2));
  const GapReport g = spectral_gap(z, DensityState::tracial(BlockLayout::full(2)));
  EXPECT_TRUE(std::isinf(g.alpha));
  EXPECT_EQ(g.kernel_dim, 4);
}

TEST(Gap, NonSymmetricGeneratorRejected) {
  Rng rng(9);
  std::vector<oracle::Jump> jumps = {{random_complex(rng, 3, 3), 1.0}};
  const Generator l = gksl_generator(to_terms(jumps), 3);
  EXPECT_THROW(spectral_gap(l, DensityState::tracial(BlockLayout::full(3))), DetailedBalanceError);
}

TEST(Gradient, Identities) {
  const ModelSpec dep = depolarizing(3);
  const Generator& l = dep.context.generator;
  const ComplexMatrix one = ComplexMatrix::Identity(3, 3);
  EXPECT_LT(gradient_form(l, one, one).norm(), 1e-14);
  Rng rng(10);
  ComplexMatrix x = random_hermitian(rng, 3).matrix();
  x -= (x.trace() / 3.0) * one;
  const ComplexMatrix expected = 0.5 * (x * x + (x * x).trace() / 3.0 * one);
  EXPECT_LT((gradient_form(l, x, x) - expected).norm(), 1e-12);

  const ModelSpec bd = birth_death(4, 0.0);
  const auto jumps = oracle::birth_death_jumps(4, 0.0);
  const auto lit = [&](const ComplexMatrix& y) { return oracle::lindblad(jumps, y); };
  for (int s = 0; s < 20; ++s) {
    const ComplexMatrix a = random_complex(rng, 4, 4), b = random_complex(rng, 4, 4);
    EXPECT_LT((gradient_form(bd.context.generator, a, b) - oracle::gradient(lit, a, b)).norm(), 1e-11);
    EXPECT_NEAR(dirichlet_form(bd.context.generator, a),
                oracle::normalized_trace_real(oracle::gradient(lit, a, a)), 1e-10);
    EXPECT_GE(oracle::hermitian_eigenvalues(gradient_form(bd.context.generator, a, a)).minCoeff(), -1e-9);
  }
}

TEST(Gradient, RademacherDegreeOne) {
  const ModelSpec m = rademacher(3, 2);
  const ComplexMatrix x = m.observables.at("degree_one");
  const ComplexMatrix g = gradient_form(m.context.generator, x, x);
  const BlockLayout& l = m.context.layout();
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  for (const ComplexMatrix& c : m.descriptor.coefficients) s += c.adjoint() * c;
  for (std::size_t k = 0; k < l.block_count(); ++k)
    EXPECT_LT((g.block(l.offset(k), l.offset(k), 2, 2) - s).norm(), 1e-12);
  EXPECT_NEAR(m.context.alpha(), 1.0, 1e-10);
}

TEST(Dirichlet, KernelAndEigenElement) {
  const ModelSpec m = birth_death(3, 0.0);
  EXPECT_NEAR(dirichlet_form(m.context.generator, ComplexMatrix::Identity(3, 3)), 0.0, 1e-14);
  const ComplexMatrix w = m.context.analysis.witness;
  EXPECT_NEAR(dirichlet_form(m.context.generator, w),
              m.context.alpha() * oracle::normalized_trace_real(w.adjoint() * w), 1e-10);
}

TEST(Regularize, DepolarizingAndConvergence) {
  const ModelSpec dep = depolarizing(2);
  const Generator l1 = regularize(dep.context.generator, 1.0);
  EXPECT_NEAR(spectral_gap(l1, dep.context.state).alpha, 0.5, 1e-12);

  const ModelSpec bd = birth_death(3, 1.0);
  Rng rng(11);
  const ComplexMatrix x = random_complex(rng, 3, 3);
  double prev = INFINITY;
  for (double eps : {1.0, 0.1, 0.01, 0.001}) {
    const Generator le = regularize(bd.context.generator, eps);
    EXPECT_NEAR(spectral_gap(le, bd.context.state).alpha,
                bd.context.alpha() / (1 + eps * bd.context.alpha()), 1e-9);
    const double diff = (le.apply(x) - bd.context.generator.apply(x)).norm();
    EXPECT_LT(diff, prev);
    prev = diff;
    const Generator lr = regularize_resolvent(bd.context.generator, eps);
    EXPECT_LT((lr.superop() - le.superop()).norm(), 1e-9 * (1 + le.superop().norm()));
  }
}

TEST(Regularize, ConvexFamilyGap) {
  const ModelSpec bd = birth_death(3, 0.5);
  const double a = bd.context.alpha();
  const double l1 = 0.3, l2 = 0.7, e1 = 1.0, e2 = 0.1;
  const ComplexMatrix s = l1 * regularize(bd.context.generator, e1).superop() +
                          l2 * regularize(bd.context.generator, e2).superop();
  const Generator mix = Generator::from_superop(bd.context.layout(), s);
  // The gap eigenvector is shared, so the convex combination keeps it.
  const double expected = l1 * a / (1 + e1 * a) + l2 * a / (1 + e2 * a);
  EXPECT_NEAR(spectral_gap(mix, bd.context.state).alpha, expected, 1e-9);
}

TEST(Composite, TensorAndSumGaps) {
  const ModelSpec d2 = depolarizing(2);
  const ModelSpec b2 = birth_death(2, 1.0);
  const Generator t = tensor_generator(d2.context.generator, b2.context.generator);
  const DensityState ts = tensor_state(d2.context.state, b2.context.state);
  const double expected = std::min(d2.context.alpha(), b2.context.alpha());
  EXPECT_NEAR(spectral_gap(t, ts).alpha, expected, 1e-9);
  EXPECT_NEAR(oracle::gap(t.superop()), expected, 1e-9);
  // Same spectrum as the Kronecker sum of the factor superoperators.
  const ComplexMatrix ks = oracle::kron(d2.context.generator.superop(), ComplexMatrix::Identity(4, 4)) +
                           oracle::kron(ComplexMatrix::Identity(4, 4), b2.context.generator.superop());
  EXPECT_LT((oracle::spectrum(ks) - oracle::spectrum(t.superop())).norm(), 1e-9);

  const Generator z = tensor_generator(b2.context.generator, zero_generator(BlockLayout::full(2)));
  EXPECT_NEAR(spectral_gap(z, tensor_state(b2.context.state, DensityState::tracial(BlockLayout::full(2)))).alpha,
              b2.context.alpha(), 1e-9);

  const Generator s = direct_sum_generator(b2.context.generator, b2.context.generator);
  EXPECT_NEAR(spectral_gap(s, direct_sum_state(b2.context.state, b2.context.state)).alpha, b2.context.alpha(), 1e-9);
  EXPECT_THROW(tensor_generator(b2.context.generator, rademacher(2, 2).context.generator), DomainError);
}
