#pragma once

// Finite-dimensional von Neumann algebras ⊕ M_{d_k}, faithful states, the
// modular flow and state-preserving conditional expectations.

#include <cstdint>
#include <memory>
#include <vector>

#include "qpoincare/matcore.hpp"

namespace qpoincare {

/// Block-diagonal algebra ⊕_k M_{d_k} embedded in M_dim. Elements are dim×dim
/// matrices vanishing off the diagonal blocks. The vectorization stacks the
/// row-major entries of each block in block order.
class BlockLayout {
 public:
  explicit BlockLayout(std::vector<Eigen::Index> sizes);
  static BlockLayout full(Eigen::Index dim) { return BlockLayout({dim}); }

  std::size_t block_count() const noexcept { return sizes_.size(); }
  Eigen::Index size(std::size_t k) const { return sizes_.at(k); }
  Eigen::Index offset(std::size_t k) const { return offsets_.at(k); }
  Eigen::Index vec_offset(std::size_t k) const { return vec_offsets_.at(k); }
  const std::vector<Eigen::Index>& sizes() const noexcept { return sizes_; }
  Eigen::Index dim() const noexcept { return dim_; }
  Eigen::Index vec_dim() const noexcept { return vec_dim_; }
  bool is_full() const noexcept { return sizes_.size() == 1; }

  /// Position of entry (i, j) of block k in the vectorization.
  Eigen::Index index(std::size_t k, Eigen::Index i, Eigen::Index j) const {
    return vec_offsets_[k] + i * sizes_[k] + j;
  }

  /// Throws DomainError if x has the wrong shape or mass off the blocks.
  ComplexVector vec(const ComplexMatrix& x) const;
  ComplexMatrix unvec(const ComplexVector& v) const;

  double off_block_norm(const ComplexMatrix& x) const;
  bool contains(const ComplexMatrix& x, double tol = 1e-12) const;
  ComplexMatrix identity() const { return ComplexMatrix::Identity(dim_, dim_); }

  friend bool operator==(const BlockLayout& a, const BlockLayout& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
  std::vector<Eigen::Index> vec_offsets_;
  Eigen::Index dim_ = 0;
  Eigen::Index vec_dim_ = 0;
};

/// vec(A X B) for block-diagonal A and B, computed block by block.
ComplexVector sandwich(const BlockLayout& layout, const ComplexVector& v, const ComplexMatrix& a,
                       const ComplexMatrix& b);

/// K·M where K is the superoperator X ↦ A X B (applied to every column of M).
ComplexMatrix sandwich_left(const BlockLayout& layout, const ComplexMatrix& m,
                            const ComplexMatrix& a, const ComplexMatrix& b);

/// M·K where K is the superoperator X ↦ A X B.
ComplexMatrix sandwich_right(const BlockLayout& layout, const ComplexMatrix& m,
                             const ComplexMatrix& a, const ComplexMatrix& b);

/// Dense superoperator of X ↦ A X B.
ComplexMatrix sandwich_superop(const BlockLayout& layout, const ComplexMatrix& a,
                               const ComplexMatrix& b);

/// Faithful state φ(x) = Tr(D x) with unit unnormalized trace. Immutable and
/// cheap to copy; the spectral decomposition is computed once.
class DensityState {
 public:
  /// Throws DomainError if D leaves the layout or Tr D ≠ 1, and
  /// SingularStateError if D is not positive definite.
  DensityState(const HermitianMatrix& d, const BlockLayout& layout);
  explicit DensityState(const HermitianMatrix& d);

  /// I / dim.
  static DensityState tracial(const BlockLayout& layout);
  /// diag(w) / Σw.
  static DensityState diagonal(const RealVector& weights);

  const HermitianMatrix& hermitian() const noexcept;
  const ComplexMatrix& matrix() const noexcept;
  const SpectralDecomposition& eig() const noexcept;
  const BlockLayout& layout() const noexcept;
  double lambda_min() const noexcept;
  Eigen::Index dim() const noexcept;

  /// D^z. Throws OverflowGuardError when |Re z|·max|log λ| > 700.
  ComplexMatrix power(Complex z) const;
  /// φ(x) = Tr(D x).
  Complex expect(const ComplexMatrix& x) const;
  /// True when D is a multiple of the identity to the given tolerance.
  bool is_tracial(double tol = 1e-12) const;

  InnerProductForm gns() const { return InnerProductForm::gns(hermitian()); }
  InnerProductForm kms() const { return InnerProductForm::kms(hermitian()); }
  InnerProductForm form(FormKind kind) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Tensor product state D₁ ⊗ D₂ on the product layout.
DensityState tensor_state(const DensityState& a, const DensityState& b);
/// (D₁ ⊕ D₂)/2 on the concatenated layout.
DensityState direct_sum_state(const DensityState& a, const DensityState& b);
/// Layout of (⊕_k M_{a_k}) ⊗ M_b with b a single block.
BlockLayout tensor_layout(const BlockLayout& a, const BlockLayout& b);
BlockLayout direct_sum_layout(const BlockLayout& a, const BlockLayout& b);

/// σ_t(x) = D^{it} x D^{-it}. At t = -iη/p this is D^{η/p} x D^{-η/p}.
/// Throws OverflowGuardError when |Im t|·log(1/λ_min) > 700.
ComplexMatrix modular_flow(const DensityState& d, const ComplexMatrix& x, Complex t);

/// Span of a family of matrices with a basis orthonormal for the declared form.
class SubalgebraBasis {
 public:
  /// Orthonormalizes the generators (Gram-Schmidt in the form, dropping
  /// directions of relative norm below 1e-10).
  SubalgebraBasis(std::vector<ComplexMatrix> generators, InnerProductForm form);

  const std::vector<ComplexMatrix>& generators() const noexcept { return generators_; }
  const std::vector<ComplexMatrix>& orthonormal_basis() const noexcept { return basis_; }
  const InnerProductForm& form() const noexcept { return form_; }
  std::size_t size() const noexcept { return basis_.size(); }

  /// Orthogonal projection onto the span in the declared form.
  ComplexMatrix project(const ComplexMatrix& x) const;
  /// ‖x − project(x)‖_F / max(‖x‖_F, tiny).
  double distance(const ComplexMatrix& x) const;
  /// Largest relative distance of b†, and of b·c for basis pairs, from the span.
  double closure_residual() const;
  /// Relative distance of the identity from the span.
  double identity_residual() const;

 private:
  std::vector<ComplexMatrix> generators_;
  std::vector<ComplexMatrix> basis_;
  InnerProductForm form_;
};

/// Idempotent, unital, state-preserving map onto a subalgebra, stored in
/// factored form P = left · right† on the vectorized algebra.
class ConditionalExpectation {
 public:
  /// Throws DomainError if P is not idempotent, unital and φ-preserving to 1e-10.
  ConditionalExpectation(BlockLayout layout, ComplexMatrix left, ComplexMatrix right,
                         DensityState state);

  static ConditionalExpectation from_projector(const BlockLayout& layout,
                                               const ComplexMatrix& projector,
                                               const DensityState& state);
  static ConditionalExpectation identity(const DensityState& state);
  /// x ↦ φ(x)·I.
  static ConditionalExpectation onto_scalars(const DensityState& state);

  ComplexMatrix apply(const ComplexMatrix& x) const;
  ComplexVector apply_vec(const ComplexVector& v) const;
  ComplexMatrix projector() const;

  const BlockLayout& layout() const noexcept { return layout_; }
  const DensityState& state() const noexcept { return state_; }
  const SubalgebraBasis& range() const noexcept { return range_; }
  Eigen::Index rank() const noexcept { return left_.cols(); }

  double idempotence_residual() const noexcept { return idempotence_; }
  double unitality_residual() const noexcept { return unitality_; }
  double state_residual() const noexcept { return state_residual_; }

  /// Largest ‖(1 − P)σ_t(b)‖_F / ‖b‖_F over range basis b and t ∈ {±0.3, ±1}.
  double modular_residual() const noexcept { return modular_residual_; }
  bool modular_invariant(double tol = 1e-9) const noexcept { return modular_residual_ < tol; }

 private:
  BlockLayout layout_;
  ComplexMatrix left_;
  ComplexMatrix right_;
  DensityState state_;
  SubalgebraBasis range_;
  double idempotence_ = 0.0;
  double unitality_ = 0.0;
  double state_residual_ = 0.0;
  double modular_residual_ = 0.0;
};

struct ExpectationReport {
  double idempotence = 0.0;
  double unitality = 0.0;
  double bimodularity = 0.0;
  double state_preservation = 0.0;
  /// Magnitude of the most negative Choi eigenvalue (0 when CP).
  double complete_positivity = 0.0;
  double closure = 0.0;
  bool pass = false;
};

/// Residuals of the Takesaki axioms on seeded random samples; pass iff all < 1e-9.
ExpectationReport check_expectation_axioms(const ConditionalExpectation& e, int samples,
                                           std::uint64_t seed = 7);

class Generator;

/// GNS(D)-orthogonal projection onto ker L. Requires GNS symmetry; throws
/// DetailedBalanceError otherwise and KernelAmbiguityError when the kernel
/// is not separated from the rest of the spectrum.
ConditionalExpectation fixed_point_projection(const Generator& l, const DensityState& d);

}  // namespace qpoincare
