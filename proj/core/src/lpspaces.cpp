#include "qpoincare/lpspaces.hpp"

#include <cmath>
#include <sstream>

#include "qpoincare/errors.hpp"

namespace qpoincare {

KosakiIndex::KosakiIndex(LpExponent p_in, double eta_in, DensityState state_in)
    : p(p_in), eta(eta_in), state(std::move(state_in)) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "KosakiIndex: eta must lie in [0, 1], got " << eta;
    throw DomainError(os.str());
  }
}

ComplexMatrix KosakiIndex::left_weight(double sign) const {
  return state.power(sign * eta * p.reciprocal());
}

ComplexMatrix KosakiIndex::right_weight(double sign) const {
  return state.power(sign * (1.0 - eta) * p.reciprocal());
}

ComplexMatrix kosaki_embed(const ComplexMatrix& x, const KosakiIndex& idx) {
  if (idx.p.is_infinite()) return x;
  return idx.left_weight() * x * idx.right_weight();
}

ComplexMatrix kosaki_unembed(const ComplexMatrix& a, const KosakiIndex& idx) {
  if (idx.p.is_infinite()) return a;
  return idx.left_weight(-1.0) * a * idx.right_weight(-1.0);
}

double kosaki_norm(const ComplexMatrix& x, const KosakiIndex& idx) {
  if (idx.p.is_infinite()) return operator_norm(x);
  return schatten_norm(kosaki_embed(x, idx), idx.p, TraceMode::unnormalized);
}

ComplexMatrix lp_lindbladian(const Generator& l, const ComplexMatrix& a, const KosakiIndex& idx) {
  return kosaki_embed(l.apply(kosaki_unembed(a, idx)), idx);
}

double eta_independence_residual(const Generator& l, const ComplexMatrix& a, LpExponent p,
                                 const DensityState& state) {
  const ComplexMatrix r0 = lp_lindbladian(l, a, KosakiIndex(p, 0.0, state));
  const ComplexMatrix rh = lp_lindbladian(l, a, KosakiIndex(p, 0.5, state));
  const ComplexMatrix r1 = lp_lindbladian(l, a, KosakiIndex(p, 1.0, state));
  const double scale = std::max(1.0, r0.norm());
  const double worst = std::max({(r0 - rh).norm(), (r0 - r1).norm(), (rh - r1).norm()});
  return worst / scale;
}

ComplexMatrix lp_conditional(const ComplexMatrix& a, const KosakiIndex& idx,
                             const ConditionalExpectation& e, LpConditionalOptions options) {
  if (!e.modular_invariant()) {
    std::ostringstream os;
    os << "lp_conditional: range is not invariant under the modular flow (residual "
       << e.modular_residual() << ")";
    throw DomainError(os.str());
  }
  const ComplexMatrix out = kosaki_embed(e.apply(kosaki_unembed(a, idx)), idx);
  if (options.verify_contractive) {
    const double before = schatten_norm(a, idx.p, TraceMode::unnormalized);
    const double after = schatten_norm(out, idx.p, TraceMode::unnormalized);
    if (after > before * (1.0 + 1e-9) + 1e-12) {
      std::ostringstream os;
      os << "lp_conditional: not contractive, " << after << " > " << before;
      throw DomainError(os.str());
    }
  }
  return out;
}

ComplexMatrix gamma_p(const Generator& l, const ComplexMatrix& a, const ComplexMatrix& b,
                      const KosakiIndex& idx) {
  if (idx.p.is_infinite() || idx.p.value() < 2.0) throw DomainError("gamma_p: requires finite p >= 2");
  const KosakiIndex half = idx.scaled(0.5);
  const ComplexMatrix ad = a.adjoint();
  return 0.5 * (lp_lindbladian(l, ad, idx) * b + ad * lp_lindbladian(l, b, idx) -
                lp_lindbladian(l, ad * b, half));
}

ComplexMatrix gamma_eta_p(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y,
                          const KosakiIndex& idx) {
  const Complex t(0.0, -idx.eta * idx.p.reciprocal());
  return gradient_form(l, modular_flow(idx.state, x, t), modular_flow(idx.state, y, t));
}

double check_gf_identification(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y,
                               const KosakiIndex& idx) {
  const ComplexMatrix lhs = gamma_p(l, kosaki_embed(x, idx), kosaki_embed(y, idx), idx);
  const ComplexMatrix w = idx.state.power(idx.p.reciprocal());
  const ComplexMatrix rhs = w * gamma_eta_p(l, x, y, idx) * w;
  return (lhs - rhs).norm() / (1.0 + rhs.norm());
}

double lipschitz_seminorm(const Generator& l, const ComplexMatrix& x) {
  const ComplexMatrix xd = x.adjoint();
  const double a = operator_norm(gradient_form(l, x, x));
  const double b = operator_norm(gradient_form(l, xd, xd));
  return std::sqrt(std::max(a, b));
}

}  // namespace qpoincare
