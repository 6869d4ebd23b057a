#pragma once

// Certificates for Poincaré-type inequalities and the derived estimates:
// PI(p,p) in tracial and Haagerup L^p, PI(p,∞), Klein and convex-chain
// lemmas, concentration, diameter, the Talagrand probe, composite gaps,
// regularization and the Khintchine bound.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpoincare/lpspaces.hpp"
#include "qpoincare/models.hpp"
#include "qpoincare/qms.hpp"

namespace qpoincare {

inline constexpr double kCertificateTol = 1e-9;

struct InequalityCertificate {
  std::string name;
  std::string model;
  std::optional<LpExponent> p;
  std::optional<LpExponent> q;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double tol = kCertificateTol;
  double margin = 0.0;      // rhs·(1+tol) − lhs
  double rel_margin = 0.0;  // margin / rhs
  std::uint64_t seed = 0;
  std::int64_t sample = 0;
  std::string mode;
  /// Preconditions of the underlying statement do not hold; not a failure.
  bool advisory = false;
};

/// Fills ratio, pass and margins from lhs, rhs and tol.
InequalityCertificate make_certificate(std::string name, std::string model, double lhs,
                                       double rhs, double constant = 1.0,
                                       double tol = kCertificateTol);

/// lhs = residual, rhs = bound: passes iff residual ≤ bound.
InequalityCertificate residual_certificate(std::string name, std::string model, double residual,
                                           double bound);

enum class PiMode { tracial_sa, haagerup_sa, haagerup_general, lip_infinity };
const char* to_string(PiMode mode) noexcept;
PiMode parse_pi_mode(const std::string& name);

struct PiOptions {
  LpExponent p{2.0};
  /// Defaults to p, or ∞ in lip_infinity mode; anything else is rejected.
  std::optional<LpExponent> q;
  PiMode mode = PiMode::tracial_sa;
  /// Admit p ∈ (2, 3) with the constant multiplied by √2.
  bool strict = false;
  double eta = 0.5;
  double tol = kCertificateTol;
};

/// p/√(2α), times √2 for p ∈ (2, 3) in strict mode. Throws DomainError for
/// exponents outside {2} ∪ [3, ∞) (or (2, 3) without the flag).
double pi_constant(const PoincareContext& ctx, const PiOptions& options);

/// Certificate for ‖x − E x‖ ≤ C·(gradient term) in the chosen mode:
///   tracial_sa        ‖x − E x‖_p ≤ C ‖Γ(x,x)^{1/2}‖_p, normalized trace
///   haagerup_sa       ‖a − E_p a‖_p ≤ C ‖Γ_p(a,a)‖_{p/2}^{1/2}, a = ι_η(x)
///   haagerup_general  ... ≤ C (‖Γ_p(a,a)^{1/2}‖_p + ‖Γ_p(a†,a†)^{1/2}‖_p)
///   lip_infinity      ‖a − E_p a‖_p ≤ C ‖x‖_Lip
/// Throws DetailedBalanceError when the context lacks the required symmetry
/// and DomainError for non-Hermitian x in the self-adjoint modes.
InequalityCertificate verify_pi(const PoincareContext& ctx, const ComplexMatrix& x,
                                const PiOptions& options);

/// φ(s) = sgn(s)|s|^{p/2} and ψ(s) = (p/2)²|s|^{p−2}.
double klein_phi(double s, double p);
double klein_psi(double s, double p);

/// τ[(φ(x) − φ(y))²] ≤ ½ τ[(x − y)²(ψ(x) + ψ(y))], normalized trace.
InequalityCertificate klein_check(const HermitianMatrix& x, const HermitianMatrix& y, double p);

/// 𝓔(φ(x)) ≤ τ(Γ(x,x) ψ(x)). Requires a τ-symmetric generator.
InequalityCertificate convex_chain_check(const PoincareContext& ctx, const HermitianMatrix& x,
                                         double p);

struct ChebyshevBound {
  double p = 0.0;
  double value = 0.0;  // 2 (t/4)^{−p} ‖x − E x‖_p^p
};

struct ConcentrationReport {
  double t = 0.0;
  /// φ(1 − e) for e the spectral projection of x − E(x) onto [−t, t].
  double tail = 0.0;
  /// ‖e(x − E x)e‖_∞, at most t by construction.
  double compressed_norm = 0.0;
  double lip = 0.0;
  double bound = 0.0;
  double p_star = 0.0;
  bool in_regime = false;
  /// 2 (4p‖x‖_Lip / (√(2α) t))^p at p = p*.
  double chebyshev_optimal = 0.0;
  std::vector<ChebyshevBound> chebyshev;
  /// ‖x‖_Lip = 0: x is a fixed point and the tail is trivially 0.
  bool fixed_point = false;
  bool pass = false;
  InequalityCertificate certificate;
};

/// p* = √(2α) t / (4e‖x‖_Lip) and the tail bound 2 exp(−√α t / (2√2 e ‖x‖_Lip)).
double concentration_p_star(double alpha, double lip, double t);
double concentration_bound(double alpha, double lip, double t);

/// Chebyshev values are evaluated at the given exponents with the symmetric
/// Kosaki norm ‖D^{1/2p}(x − E x)D^{1/2p}‖_p.
ConcentrationReport concentration_certificate(const PoincareContext& ctx,
                                              const HermitianMatrix& x, double t,
                                              const std::vector<double>& chebyshev_p = {3, 4, 6});

struct DiameterReport {
  double lambda_min = 0.0;
  double log_inverse_lambda_min = 0.0;
  double diameter = 0.0;  // e·log(1/λ_min)/√(2α)
  double max_ratio = 0.0;
  /// log(1/λ_min) ≤ 3: the bound is reported but not asserted.
  bool advisory = false;
  bool pass = false;
  std::vector<InequalityCertificate> certificates;
};

/// ‖x − E x‖_∞ ≤ diam·‖x‖_Lip on seeded random Hermitian x.
DiameterReport diameter_check(const PoincareContext& ctx, int samples, std::uint64_t seed);

/// D(ρ‖σ) = Tr ρ(log ρ − log σ) for a density ρ and a faithful density σ.
double relative_entropy(const HermitianMatrix& rho, const HermitianMatrix& sigma);

/// Predual E_* of E under the pairing Tr(ρ x).
ComplexMatrix expectation_predual(const ConditionalExpectation& e, const ComplexMatrix& rho);

struct TalagrandReport {
  int n = 0;
  double beta = 0.0;
  double alpha = 0.0;
  /// |μ_A(f) − μ_B(f)| for the linear test function f.
  double f_value = 0.0;
  double lip = 0.0;
  bool lip_ok = false;
  double entropy_a = 0.0;  // D(μ_A ‖ E_* μ_A)
  double entropy_b = 0.0;
  double neg_log_mu_a = 0.0;
  double neg_log_mu_b = 0.0;
  /// f_value / (√D_A + √D_B).
  double c_min = 0.0;
};

TalagrandReport talagrand_probe(int n, double beta);

struct CompositeGapReport {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double expected = 0.0;
  double tensor_alpha = 0.0;
  double sum_alpha = 0.0;
  double tensor_residual = 0.0;
  double sum_residual = 0.0;
  /// −log(‖T_1 w‖_φ/‖w‖_φ) for w = x₁ ⊗ 1 and w = x₁ ⊕ 0.
  double tensor_decay = 0.0;
  double sum_decay = 0.0;
  double tensor_decay_residual = 0.0;
  double sum_decay_residual = 0.0;
  bool pass = false;
};

/// Gaps of L₁ ⊗ Id + Id ⊗ L₂ and L₁ ⊕ L₂ against min(α₁, α₂), plus the
/// decay rate of x₁ ⊗ 1 for the gap eigen-element x₁ of L₁.
CompositeGapReport composite_gap_check(const PoincareContext& c1, const PoincareContext& c2);

struct RegularizationReport {
  std::vector<double> eps;
  std::vector<double> gap;
  std::vector<double> expected;
  std::vector<double> gap_residual;
  /// diffs[s][k] = ‖L_ε(x_s) − L(x_s)‖_F at eps[k].
  std::vector<std::vector<double>> diffs;
  /// Steps where the difference failed to decrease as ε decreases.
  int monotonicity_violations = 0;
  bool pass = false;
};

/// gap(L_ε) against α/(1+εα) and convergence L_ε → L on random elements.
RegularizationReport regularization_check(const PoincareContext& ctx, std::vector<double> eps,
                                          int samples, std::uint64_t seed);

/// Largest η-independence residual of 𝓛_p over seeded random elements.
double eta_independence_check(const PoincareContext& ctx, LpExponent p, int samples,
                              std::uint64_t seed);

/// Largest Γ_p identification residual over seeded random pairs.
double gf_identification_check(const PoincareContext& ctx, LpExponent p, double eta, int samples,
                               std::uint64_t seed);

/// (E_ω ‖Σ εᵢ(ω) aᵢ‖_p^p)^{1/p} ≤ (p/√2)(‖(Σaᵢ†aᵢ)^{1/2}‖_p + ‖(Σaᵢaᵢ†)^{1/2}‖_p),
/// unnormalized trace, averaging over all sign patterns.
InequalityCertificate khintchine_check(const std::vector<ComplexMatrix>& a, double p);

}  // namespace qpoincare
