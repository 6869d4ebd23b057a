#pragma once

// Quantum Markov semigroups in the Heisenberg picture: GKSL generators,
// semigroup evaluation, detailed-balance diagnostics and spectral gaps.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpoincare/algebra.hpp"
#include "qpoincare/matcore.hpp"

namespace qpoincare {

/// Summand w·(c†c x + x c†c − 2 c† x c) of a GKSL generator.
struct JumpTerm {
  JumpTerm(ComplexMatrix op, double weight);
  ComplexMatrix op;
  double weight;
};

enum class SymmetryTag : unsigned { tau_symmetric = 1u, gns_db = 2u, kms_db = 4u };

/// Set of symmetry tags; the empty set means "none".
class SymmetryTags {
 public:
  SymmetryTags() = default;
  SymmetryTags(std::initializer_list<SymmetryTag> tags) {
    for (SymmetryTag t : tags) insert(t);
  }
  bool has(SymmetryTag t) const noexcept { return (bits_ & static_cast<unsigned>(t)) != 0; }
  void insert(SymmetryTag t) noexcept { bits_ |= static_cast<unsigned>(t); }
  bool empty() const noexcept { return bits_ == 0; }
  SymmetryTags intersect(SymmetryTags o) const noexcept {
    SymmetryTags r;
    r.bits_ = bits_ & o.bits_;
    return r;
  }
  std::vector<std::string> names() const;
  static SymmetryTag parse(const std::string& name);
  friend bool operator==(SymmetryTags, SymmetryTags) = default;

 private:
  unsigned bits_ = 0;
};

struct GeneratorInvariants {
  double unitality = 0.0;        // ‖L(I)‖_max
  double hermiticity = 0.0;      // max ‖L(x)† − L(x†)‖_F over spot checks
  double conditional_positivity = 0.0;  // most negative eigenvalue of Γ(x,x), as magnitude
};

/// Lindbladian L acting on a block algebra. Stores the optional jump list,
/// the superoperator on the vectorized algebra, symmetry tags and the
/// reference state the tags refer to. Immutable and cheap to copy.
class Generator {
 public:
  /// L(x) = Σ w (c†c x + x c†c − 2 c† x c) on M_dim.
  static Generator from_jumps(std::vector<JumpTerm> jumps, Eigen::Index dim);
  /// Arbitrary superoperator on the vectorized layout.
  static Generator from_superop(const BlockLayout& layout, ComplexMatrix superop);

  /// Copy carrying the given tags, which refer to the given reference state.
  Generator with_tags(SymmetryTags tags, std::optional<DensityState> reference) const;

  const BlockLayout& layout() const noexcept;
  Eigen::Index dim() const noexcept;
  Eigen::Index vec_dim() const noexcept;
  const std::vector<JumpTerm>& jumps() const noexcept;
  bool has_jumps() const noexcept;
  const ComplexMatrix& superop() const noexcept;
  SymmetryTags tags() const noexcept;
  const std::optional<DensityState>& reference_state() const noexcept;
  const GeneratorInvariants& invariants() const noexcept;

  ComplexMatrix apply(const ComplexMatrix& x) const;
  ComplexVector apply_vec(const ComplexVector& v) const;

 private:
  struct Data;
  explicit Generator(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  static Generator validated(std::shared_ptr<Data> d);
  std::shared_ptr<const Data> data_;
};

Generator gksl_generator(std::vector<JumpTerm> jumps, Eigen::Index dim);

/// L = Id − E.
Generator projection_generator(const ConditionalExpectation& e);

/// Generator with L(x) = 0.
Generator zero_generator(const BlockLayout& layout);

/// Dense exp(−t·superop). Throws DomainError for t < 0.
ComplexMatrix semigroup_superop(const Generator& l, double t);
ComplexMatrix apply_semigroup(const Generator& l, const ComplexMatrix& x, double t);

/// max over matrix-unit pairs of |τ(x†L(y)) − τ(L(x)†y)|, τ normalized.
double check_tau_symmetry(const Generator& l);

/// max over matrix units of the deviation in L_*(D^{1/2} x D^{1/2}) = D^{1/2} L(x) D^{1/2},
/// with L_* the predual under the pairing Tr(ρ x).
double check_kms_db(const Generator& l, const DensityState& d);

struct GnsReport {
  double symmetry = 0.0;     // max |φ(L(x)†y) − φ(x†L(y))| over matrix units
  double commutation = 0.0;  // max entry of σ_t∘L − L∘σ_t, t ∈ {0.5, 1}
  double residual() const { return std::max(symmetry, commutation); }
};
GnsReport gns_report(const Generator& l, const DensityState& d);
double check_gns_db(const Generator& l, const DensityState& d);

/// Square root of the Gram operator of a form, as X ↦ left·X·right.
struct FormFrame {
  ComplexMatrix left, right;          // G^{1/2}
  ComplexMatrix left_inv, right_inv;  // G^{-1/2}
  static FormFrame make(const DensityState& d, FormKind kind);
};

struct GapReport {
  /// Smallest eigenvalue above the kernel cutoff; +∞ when L = 0.
  double alpha = 0.0;
  Eigen::Index kernel_dim = 0;
  RealVector spectrum;
  FormKind form = FormKind::gns;
  /// Rayleigh quotient ⟨x, L x⟩/⟨x, x⟩ of the gap eigen-element in the form,
  /// evaluated through L directly rather than the symmetrized frame.
  double dirichlet_alpha = 0.0;
  /// Largest |λ| classified as zero and the relative asymmetry of the frame.
  double largest_zero = 0.0;
  double asymmetry = 0.0;
};

/// Spectral analysis of a detailed-balanced generator in one eigendecomposition.
struct Analysis {
  GapReport gap;
  ConditionalExpectation expectation;
  /// Self-adjoint eigen-element L(x) = αx with E(x) = 0 and unit form norm;
  /// zero when no nonzero eigenvalue exists.
  ComplexMatrix witness;
  FormFrame frame;
  SpectralDecomposition frame_eig;

  /// T_t(x) through the eigendecomposition.
  ComplexMatrix evolve(const BlockLayout& layout, const ComplexMatrix& x, double t) const;
};

/// Throws DetailedBalanceError if the generator is not self-adjoint in the
/// form (relative asymmetry ≥ 1e-9) and KernelAmbiguityError if the kernel
/// is not separated from the rest of the spectrum by at least 1e-8.
Analysis analyze(const Generator& l, const DensityState& d, FormKind form = FormKind::gns);
GapReport spectral_gap(const Generator& l, const DensityState& d, FormKind form = FormKind::gns);

/// A generator, its reference state, the spectral analysis in one form and
/// the three detailed-balance residuals. Everything downstream consumes this.
struct PoincareContext {
  std::string model;
  Generator generator;
  DensityState state;
  Analysis analysis;
  double tau_residual = 0.0;
  double gns_residual = 0.0;
  double kms_residual = 0.0;

  static PoincareContext build(std::string model, const Generator& l, const DensityState& d,
                               FormKind form = FormKind::gns);

  double alpha() const noexcept { return analysis.gap.alpha; }
  const ConditionalExpectation& expectation() const noexcept { return analysis.expectation; }
  const BlockLayout& layout() const noexcept { return generator.layout(); }
};

/// Γ(x, y) = ½(L(x†)y + x†L(y) − L(x†y)).
ComplexMatrix gradient_form(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y);

/// τ(x†L(x)) with the normalized trace.
double dirichlet_form(const Generator& l, const ComplexMatrix& x);

/// L_ε = L(1 + εL)^{-1}. Uses spectral calculus in the detailed-balance frame
/// of the reference state when there is one and the resolvent otherwise.
Generator regularize(const Generator& l, double eps);
Generator regularize_resolvent(const Generator& l, double eps);

/// L₁ ⊗ Id + Id ⊗ L₂. The second factor must act on a full matrix algebra.
Generator tensor_generator(const Generator& l1, const Generator& l2);
/// L₁ ⊕ L₂ acting blockwise.
Generator direct_sum_generator(const Generator& l1, const Generator& l2);

}  // namespace qpoincare
