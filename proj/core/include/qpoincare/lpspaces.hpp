#pragma once

// Weighted noncommutative L^p spaces of a faithful state in finite dimension:
// Kosaki embeddings x ↦ D^{η/p} x D^{(1−η)/p}, their Schatten norms, and the
// L^p versions of the generator, the conditional expectation and the
// gradient form.

#include "qpoincare/algebra.hpp"
#include "qpoincare/matcore.hpp"
#include "qpoincare/qms.hpp"

namespace qpoincare {

struct KosakiIndex {
  /// Throws DomainError unless 0 ≤ eta ≤ 1.
  KosakiIndex(LpExponent p, double eta, DensityState state);

  LpExponent p;
  double eta;
  DensityState state;

  /// Same state and η with exponent scaled by factor.
  KosakiIndex scaled(double factor) const { return KosakiIndex(p.scaled(factor), eta, state); }
  /// D^{η/p} and D^{(1−η)/p}, or identities for p = ∞.
  ComplexMatrix left_weight(double sign = 1.0) const;
  ComplexMatrix right_weight(double sign = 1.0) const;
};

/// ι_η(x) = D^{η/p} x D^{(1−η)/p}; the identity map for p = ∞.
ComplexMatrix kosaki_embed(const ComplexMatrix& x, const KosakiIndex& idx);
/// Inverse of kosaki_embed.
ComplexMatrix kosaki_unembed(const ComplexMatrix& a, const KosakiIndex& idx);

/// ‖ι_η(x)‖_p with the unnormalized trace; ‖x‖_∞ for p = ∞.
double kosaki_norm(const ComplexMatrix& x, const KosakiIndex& idx);

/// 𝓛_p(a) = D^{η/p} L(x) D^{(1−η)/p} where a = D^{η/p} x D^{(1−η)/p}.
ComplexMatrix lp_lindbladian(const Generator& l, const ComplexMatrix& a, const KosakiIndex& idx);

/// Largest relative difference ‖𝓛_p^{(η)}(a) − 𝓛_p^{(η')}(a)‖_F / max(1, ‖𝓛_p^{(0)}(a)‖_F)
/// over η, η' ∈ {0, ½, 1} for one element a.
double eta_independence_residual(const Generator& l, const ComplexMatrix& a, LpExponent p,
                                 const DensityState& state);

struct LpConditionalOptions {
  /// Also compare ‖E_p(a)‖ with ‖a‖ and throw DomainError if contractivity fails.
  bool verify_contractive = false;
};

/// E_p(D^{η/p} x D^{(1−η)/p}) = D^{η/p} E(x) D^{(1−η)/p}. Throws DomainError
/// when the range of E is not invariant under the modular flow.
ComplexMatrix lp_conditional(const ComplexMatrix& a, const KosakiIndex& idx,
                             const ConditionalExpectation& e, LpConditionalOptions options = {});

/// Γ_p(a, b) = ½(𝓛_p(a†)b + a†𝓛_p(b) − 𝓛_{p/2}(a†b)). Requires finite p ≥ 2.
ComplexMatrix gamma_p(const Generator& l, const ComplexMatrix& a, const ComplexMatrix& b,
                      const KosakiIndex& idx);

/// Γ^{(p)}_η(x, y) = Γ(σ_{−iη/p}(x), σ_{−iη/p}(y)).
ComplexMatrix gamma_eta_p(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y,
                          const KosakiIndex& idx);

/// ‖Γ_p(ι x, ι y) − D^{1/p} Γ^{(p)}_η(x, y) D^{1/p}‖_F / (1 + ‖D^{1/p} Γ^{(p)}_η(x, y) D^{1/p}‖_F).
double check_gf_identification(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y,
                               const KosakiIndex& idx);

/// max{‖Γ(x,x)‖^{1/2}, ‖Γ(x†,x†)‖^{1/2}} in operator norm.
double lipschitz_seminorm(const Generator& l, const ComplexMatrix& x);

}  // namespace qpoincare
