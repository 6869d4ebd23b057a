#pragma once

// Dense complex matrix kernel: Hermitian eigendecomposition, functional
// calculus, complex powers, Schatten norms and the three inner products
// (Hilbert-Schmidt, GNS, KMS) used throughout the library.

#include <complex>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace qpoincare {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPositivityTol = 1e-12;

/// Relative anti-Hermitian part ‖A − A†‖_F / (1 + ‖A‖_F).
double hermitian_residual(const ComplexMatrix& a);

/// Square matrix known to be Hermitian. Construction checks the relative
/// tolerance 1e-12 and stores the symmetrized (A + A†)/2.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& a);

  /// Symmetrizes without checking. For results of functional calculus and
  /// similar operations whose Hermiticity holds by construction.
  static HermitianMatrix symmetrized(const ComplexMatrix& a);

  static HermitianMatrix identity(Eigen::Index dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix a, Trusted) : m_(std::move(a)) {}
  ComplexMatrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, columns match eigenvalues

  ComplexMatrix reconstruct() const;
};

/// Hermitian eigendecomposition.
///
/// Dimensions up to 64 use cyclic complex Jacobi (off-diagonal threshold
/// 1e-13·‖A‖_F, at most 40 sweeps). Larger matrices, which only arise as
/// superoperators, go through Eigen's tridiagonal QR solver. Both routes
/// share the same canonicalization: eigenvalues ascending, eigenvectors of
/// a numerically degenerate cluster re-orthonormalized by Gram-Schmidt in
/// index order, and each eigenvector phased so that its first nonzero
/// component is real positive. Output is bit-reproducible for a given input.
SpectralDecomposition herm_eig(const HermitianMatrix& a);

/// Largest dimension routed through the Jacobi solver.
inline constexpr Eigen::Index kJacobiMaxDim = 64;

/// Cyclic Jacobi eigensolver without the size switch; exposed for tests and
/// benchmarks.
SpectralDecomposition jacobi_eig(const HermitianMatrix& a);

/// herm_eig after splitting A into the connected components of its nonzero
/// pattern. Each component is decomposed on its own and the results merged
/// by the same sort and phase rule; degenerate clusters are not re-orthonormalized
/// across components since their supports are disjoint. Superoperators of local generators are
/// highly reducible, which turns a 1024-dimensional problem into many small ones.
SpectralDecomposition herm_eig_reducible(const HermitianMatrix& a);

using RealFunction = std::function<double(double)>;

/// U f(Λ) U†. Throws DomainError naming the eigenvalue if f returns a
/// non-finite value on it.
HermitianMatrix func_calc(const HermitianMatrix& a, const RealFunction& f);
HermitianMatrix func_calc(const SpectralDecomposition& eig, const RealFunction& f);

/// D^z for positive-definite D using principal powers of the eigenvalues.
/// Throws SingularStateError if λ_min(D) ≤ min_eigenvalue.
ComplexMatrix mpow(const HermitianMatrix& d, Complex z, double min_eigenvalue = kPositivityTol);
ComplexMatrix mpow(const SpectralDecomposition& eig, Complex z,
                   double min_eigenvalue = kPositivityTol);

/// Exponent p ∈ [1, ∞] of a Schatten or L^p norm. Infinity is its own state,
/// never a floating-point sentinel.
class LpExponent {
 public:
  /// Throws DomainError for p < 1 or non-finite p.
  explicit LpExponent(double p);
  static LpExponent infinity() { return LpExponent(); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; throws DomainError for the infinite exponent.
  double value() const;
  /// Multiplies a finite exponent; infinity stays infinity.
  LpExponent scaled(double factor) const;
  /// 1/p, zero for infinity.
  double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / p_; }

  friend bool operator==(const LpExponent&, const LpExponent&) = default;

 private:
  LpExponent() : p_(0.0), infinite_(true) {}
  double p_;
  bool infinite_;
};

enum class TraceMode { normalized, unnormalized };

/// Singular values in descending order.
RealVector singular_values(const ComplexMatrix& a);

/// ‖A‖_p = (Σ σᵢ^p)^{1/p}, the sum replaced by the average in normalized
/// mode. p = ∞ gives the largest singular value in either mode.
double schatten_norm(const ComplexMatrix& a, LpExponent p, TraceMode mode);

enum class FormKind { hs, gns, kms };

/// Inner product on matrices, optionally weighted by a positive-definite density.
class InnerProductForm {
 public:
  static InnerProductForm hs() { return InnerProductForm(FormKind::hs, std::nullopt, {}); }
  /// Throws SingularStateError unless the density is positive definite.
  static InnerProductForm gns(const HermitianMatrix& density);
  static InnerProductForm kms(const HermitianMatrix& density);

  FormKind kind() const noexcept { return kind_; }
  const std::optional<HermitianMatrix>& density() const noexcept { return density_; }
  /// Weight inserted between x† and y: D for GNS, D^{1/2} for KMS.
  const ComplexMatrix& weight() const noexcept { return weight_; }

 private:
  InnerProductForm(FormKind kind, std::optional<HermitianMatrix> density, ComplexMatrix weight)
      : kind_(kind), density_(std::move(density)), weight_(std::move(weight)) {}
  FormKind kind_;
  std::optional<HermitianMatrix> density_;
  ComplexMatrix weight_;
};

const char* to_string(FormKind kind) noexcept;

/// HS: Tr(x†y). GNS(D): Tr(D x† y). KMS(D): Tr(D^{1/2} x† D^{1/2} y).
Complex inner_product(const ComplexMatrix& x, const ComplexMatrix& y, const InnerProductForm& form);

/// Trace normalized by the dimension.
Complex normalized_trace(const ComplexMatrix& a);

/// Operator norm (largest singular value).
double operator_norm(const ComplexMatrix& a);

}  // namespace qpoincare
