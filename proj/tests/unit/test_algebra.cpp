#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpoincare/algebra.hpp"
#include "qpoincare/errors.hpp"
#include "qpoincare/models.hpp"
#include "qpoincare/qms.hpp"
#include "qpoincare/random.hpp"

using namespace qpoincare;

TEST(BlockLayout, VecRoundTripAndIndex) {
  const BlockLayout l({2, 3});
  EXPECT_EQ(l.dim(), 5);
  EXPECT_EQ(l.vec_dim(), 13);
  EXPECT_EQ(l.index(1, 2, 0), 4 + 6);
  Rng rng(1);
  const ComplexMatrix x = random_element(rng, l);
  EXPECT_LT(l.off_block_norm(x), 1e-15);
  EXPECT_LT((l.unvec(l.vec(x)) - x).norm(), 1e-15);
  ComplexMatrix bad = x;
  bad(0, 4) = 1.0;
  EXPECT_FALSE(l.contains(bad));
  EXPECT_THROW(l.vec(bad), DomainError);
}

TEST(Sandwich, SuperopMatchesKronecker) {
  Rng rng(2);
  const BlockLayout l = BlockLayout::full(3);
  const ComplexMatrix a = random_complex(rng, 3, 3), b = random_complex(rng, 3, 3);
  const ComplexMatrix s = sandwich_superop(l, a, b);
  const ComplexMatrix ref = oracle::superop([&](const ComplexMatrix& x) { return ComplexMatrix(a * x * b); }, 3);
  EXPECT_LT((s - ref).norm(), 1e-12);
  EXPECT_LT((oracle::kron(a, b.transpose()) - ref).norm(), 1e-12);
  const ComplexMatrix m = random_complex(rng, 9, 4);
  EXPECT_LT((sandwich_left(l, m, a, b) - ref * m).norm(), 1e-12);
  const ComplexMatrix n = random_complex(rng, 4, 9);
  EXPECT_LT((sandwich_right(l, n, a, b) - n * ref).norm(), 1e-12);
}

TEST(DensityState, Validation) {
  ComplexMatrix d = ComplexMatrix::Identity(2, 2) * 0.6;
  EXPECT_THROW(DensityState{HermitianMatrix(d)}, DomainError);
  d(1, 1) = 0.0;
  d(0, 0) = 1.0;
  EXPECT_THROW(DensityState{HermitianMatrix(d)}, SingularStateError);
  const DensityState t = DensityState::tracial(BlockLayout({2, 2}));
  EXPECT_TRUE(t.is_tracial());
  EXPECT_NEAR(t.matrix().trace().real(), 1.0, 1e-15);
}

TEST(ModularFlow, TrivialCases) {
  Rng rng(3);
  const DensityState d(random_density(rng, 4));
  const ComplexMatrix x = random_complex(rng, 4, 4);
  EXPECT_LT((modular_flow(d, x, 0.0) - x).norm(), 1e-12);
  const DensityState t = DensityState::tracial(BlockLayout::full(4));
  EXPECT_LT((modular_flow(t, x, Complex(0.7, -0.4)) - x).norm(), 1e-12);
}

TEST(ModularFlow, GroupLawAndAutomorphism) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int s = 0; s < 20; ++s) {
    const DensityState d(random_density(rng, 4));
    const ComplexMatrix x = random_complex(rng, 4, 4), y = random_complex(rng, 4, 4);
    const Complex t1(u(rng), u(rng)), t2(u(rng), u(rng));
    const ComplexMatrix composed = modular_flow(d, modular_flow(d, x, t2), t1);
    EXPECT_LT((composed - modular_flow(d, x, t1 + t2)).norm(), 1e-9 * (1 + composed.norm()));
    const double t = u(rng) * 3;
    const ComplexMatrix sx = modular_flow(d, x, t), sy = modular_flow(d, y, t);
    EXPECT_LT((modular_flow(d, x * y, t) - sx * sy).norm(), 1e-10 * (1 + (x * y).norm()));
    EXPECT_LT((modular_flow(d, x.adjoint(), t) - sx.adjoint()).norm(), 1e-10 * (1 + x.norm()));
    // Explicit formula at imaginary time.
    const ComplexMatrix dp = oracle::positive_power(d.matrix(), 0.3);
    const ComplexMatrix dm = oracle::positive_power(d.matrix(), -0.3);
    EXPECT_LT((modular_flow(d, x, Complex(0, -0.3)) - dp * x * dm).norm(), 1e-10 * (1 + x.norm()));
  }
}

TEST(ModularFlow, OverflowGuard) {
  const DensityState d = DensityState::diagonal(RealVector::Constant(2, 1.0).cwiseProduct(RealVector::LinSpaced(2, 1, 2)));
  EXPECT_THROW(modular_flow(d, ComplexMatrix::Identity(2, 2), Complex(0, 5000)), OverflowGuardError);
}

TEST(FixedPoint, Depolarizing) {
  const ModelSpec m = depolarizing(2);
  const ConditionalExpectation e = fixed_point_projection(m.context.generator, m.context.state);
  EXPECT_EQ(e.rank(), 1);
  Rng rng(5);
  const ComplexMatrix x = random_complex(rng, 2, 2);
  const ComplexMatrix expected = (x.trace() / 2.0) * ComplexMatrix::Identity(2, 2);
  EXPECT_LT((e.apply(x) - expected).norm(), 1e-12);
}

TEST(FixedPoint, BirthDeathPrimitive) {
  const ModelSpec m = birth_death(3, 1.0);
  const ConditionalExpectation e = fixed_point_projection(m.context.generator, m.context.state);
  EXPECT_EQ(e.rank(), 1);
  // Kernel of the 9×9 superoperator is one-dimensional in an independent solver.
  const auto jumps = oracle::birth_death_jumps(3, 1.0);
  const ComplexMatrix s = oracle::superop([&](const ComplexMatrix& x) { return oracle::lindblad(jumps, x); }, 3);
  const RealVector spec = oracle::spectrum(s);
  EXPECT_NEAR(spec(0), 0.0, 1e-10);
  EXPECT_GT(spec(1), 1e-3);
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix x = random_complex(rng, 3, 3);
    EXPECT_LT(std::abs(m.context.state.expect(e.apply(x)) - m.context.state.expect(x)), 1e-10 * (1 + x.norm()));
  }
  EXPECT_TRUE(e.modular_invariant());
}

TEST(FixedPoint, RademacherIsCoordinateAverage) {
  const ModelSpec m = rademacher(2, 2);
  const ConditionalExpectation& e = m.context.expectation();
  const BlockLayout& l = m.context.layout();
  Rng rng(7);
  const ComplexMatrix x = random_element(rng, l);
  ComplexMatrix avg = ComplexMatrix::Zero(2, 2);
  for (std::size_t k = 0; k < l.block_count(); ++k) avg += x.block(l.offset(k), l.offset(k), 2, 2);
  avg /= static_cast<double>(l.block_count());
  ComplexMatrix expected = ComplexMatrix::Zero(l.dim(), l.dim());
  for (std::size_t k = 0; k < l.block_count(); ++k) expected.block(l.offset(k), l.offset(k), 2, 2) = avg;
  EXPECT_LT((e.apply(x) - expected).norm(), 1e-12);
  EXPECT_LT(e.apply(m.observables.at("degree_one")).norm(), 1e-12);
}

TEST(Expectation, IdentityAndTrace) {
  Rng rng(8);
  const DensityState d(random_density(rng, 3));
  const ExpectationReport id = check_expectation_axioms(ConditionalExpectation::identity(d), 20);
  EXPECT_TRUE(id.pass);
  EXPECT_LT(id.bimodularity, 1e-12);
  const ExpectationReport tr = check_expectation_axioms(ConditionalExpectation::onto_scalars(d), 20);
  EXPECT_TRUE(tr.pass);
  EXPECT_LT(tr.bimodularity, 1e-12);
  EXPECT_LT(tr.complete_positivity, 1e-12);
}

TEST(Expectation, NonMultiplicativeProjectionFlagged) {
  // Orthogonal projection onto span{I, h} with h traceless: idempotent,
  // unital and trace preserving, but h² leaves the span.
  const BlockLayout l = BlockLayout::full(3);
  Rng rng(9);
  ComplexMatrix h = random_hermitian(rng, 3).matrix();
  h -= (h.trace() / 3.0) * ComplexMatrix::Identity(3, 3);
  h /= h.norm();
  const ComplexVector v1 = l.vec(ComplexMatrix::Identity(3, 3)) / std::sqrt(3.0);
  const ComplexVector v2 = l.vec(h);
  const ComplexMatrix p = v1 * v1.adjoint() + v2 * v2.adjoint();
  const ConditionalExpectation e =
      ConditionalExpectation::from_projector(l, p, DensityState::tracial(l));
  const ExpectationReport r = check_expectation_axioms(e, 20);
  EXPECT_GT(r.bimodularity, 1e-3);
  EXPECT_FALSE(r.pass);
}

TEST(Expectation, RejectsNonIdempotent) {
  const BlockLayout l = BlockLayout::full(2);
  const ComplexMatrix p = 0.5 * ComplexMatrix::Identity(4, 4);
  EXPECT_THROW(ConditionalExpectation::from_projector(l, p, DensityState::tracial(l)), DomainError);
}

TEST(Subalgebra, DiagonalSpan) {
  std::vector<ComplexMatrix> g = {oracle::unit(3, 0, 0), oracle::unit(3, 1, 1), oracle::unit(3, 2, 2)};
  RealVector w(3);
  w << 0.5, 0.3, 0.2;
  const SubalgebraBasis b(g, DensityState::diagonal(w).gns());
  EXPECT_EQ(b.size(), 3u);
  EXPECT_LT(b.closure_residual(), 1e-12);
  EXPECT_LT(b.identity_residual(), 1e-12);
  EXPECT_NEAR(b.distance(oracle::unit(3, 0, 1)), 1.0, 1e-12);
}

TEST(States, TensorAndDirectSum) {
  Rng rng(11);
  const DensityState a(random_density(rng, 2)), b(random_density(rng, 3));
  const DensityState t = tensor_state(a, b);
  EXPECT_LT((t.matrix() - oracle::kron(a.matrix(), b.matrix())).norm(), 1e-14);
  const DensityState s = direct_sum_state(a, b);
  EXPECT_EQ(s.layout().block_count(), 2u);
  EXPECT_NEAR(s.matrix().trace().real(), 1.0, 1e-14);
  EXPECT_LT((s.matrix().topLeftCorner(2, 2) - a.matrix() / 2.0).norm(), 1e-14);
}
