#include "qpoincare/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qpoincare/errors.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare {

namespace {

constexpr double kSymmetryTol = 1e-9;

void require_tau(const PoincareContext& ctx, const char* what) {
  if (ctx.tau_residual >= kSymmetryTol || !ctx.state.is_tracial()) {
    std::ostringstream os;
    os << what << ": " << ctx.model << " is not tau-symmetric with a tracial state (residual "
       << ctx.tau_residual << ")";
    throw DetailedBalanceError(os.str(), ctx.tau_residual);
  }
}

void require_gns(const PoincareContext& ctx, const char* what) {
  if (ctx.gns_residual >= kSymmetryTol) {
    std::ostringstream os;
    os << what << ": " << ctx.model << " is not GNS detailed balanced (residual "
       << ctx.gns_residual << ")";
    throw DetailedBalanceError(os.str(), ctx.gns_residual);
  }
  if (!ctx.expectation().modular_invariant()) {
    std::ostringstream os;
    os << what << ": fixed-point algebra of " << ctx.model << " is not modular invariant";
    throw DetailedBalanceError(os.str(), ctx.expectation().modular_residual());
  }
}

void require_self_adjoint(const ComplexMatrix& x, const char* what) {
  const double r = hermitian_residual(x);
  if (r > kHermitianTol) {
    std::ostringstream os;
    os << what << ": element is not self-adjoint (residual " << r << ")";
    throw NotHermitianError(os.str(), r);
  }
}

// ‖G^{1/2}‖_p for G ≥ 0, as ‖G‖_{p/2}^{1/2}.
double sqrt_norm(const ComplexMatrix& g, double p, TraceMode mode) {
  return std::sqrt(schatten_norm(HermitianMatrix::symmetrized(g).matrix(), LpExponent(p / 2.0), mode));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

double gap_residual(double got, double expected) {
  if (std::isinf(expected) && std::isinf(got)) return 0.0;
  return std::abs(got - expected) / std::max(1.0, std::abs(expected));
}

// −log(‖T_1 w‖_φ / ‖w‖_φ).
double decay_rate(const Generator& l, const DensityState& d, const ComplexMatrix& w) {
  const InnerProductForm form = d.gns();
  const double before = std::sqrt(inner_product(w, w, form).real());
  const ComplexMatrix tw = apply_semigroup(l, w, 1.0);
  const double after = std::sqrt(inner_product(tw, tw, form).real());
  return -std::log(after / before);
}

}  // namespace

InequalityCertificate make_certificate(std::string name, std::string model, double lhs,
                                       double rhs, double constant, double tol) {
  InequalityCertificate c;
  c.name = std::move(name);
  c.model = std::move(model);
  c.lhs = lhs;
  c.rhs = rhs;
  c.constant = constant;
  c.tol = tol;
  if (rhs > 0.0)
    c.ratio = lhs / rhs;
  else
    c.ratio = lhs > 0.0 ? std::numeric_limits<double>::max() : 0.0;
  c.pass = lhs <= rhs * (1.0 + tol);
  c.margin = rhs * (1.0 + tol) - lhs;
  if (rhs > 0.0)
    c.rel_margin = c.margin / rhs;
  else
    c.rel_margin = lhs > 0.0 ? -1.0 : 0.0;
  return c;
}

InequalityCertificate residual_certificate(std::string name, std::string model, double residual,
                                           double bound) {
  return make_certificate(std::move(name), std::move(model), residual, bound, 1.0, 0.0);
}

const char* to_string(PiMode mode) noexcept {
  switch (mode) {
    case PiMode::tracial_sa:
      return "tracial_sa";
    case PiMode::haagerup_sa:
      return "haagerup_sa";
    case PiMode::haagerup_general:
      return "haagerup_general";
    case PiMode::lip_infinity:
      return "lip_infinity";
  }
  return "unknown";
}

PiMode parse_pi_mode(const std::string& name) {
  for (PiMode m : {PiMode::tracial_sa, PiMode::haagerup_sa, PiMode::haagerup_general,
                   PiMode::lip_infinity})
    if (name == to_string(m)) return m;
  throw DomainError("unknown PI mode '" + name + "'");
}

double pi_constant(const PoincareContext& ctx, const PiOptions& options) {
  if (options.p.is_infinite()) throw DomainError("PI: exponent must be finite");
  const double p = options.p.value();
  double factor = 1.0;
  if (p < 2.0) throw DomainError("PI: exponent must be at least 2");
  if (p > 2.0 && p < 3.0) {
    if (!options.strict) {
      std::ostringstream os;
      os << "PI: p = " << p << " lies in (2, 3); enable strict mode for the sqrt(2) variant";
      throw DomainError(os.str());
    }
    factor = std::sqrt(2.0);
  }
  const double alpha = ctx.alpha();
  if (std::isinf(alpha)) return 0.0;
  return factor * p / std::sqrt(2.0 * alpha);
}

InequalityCertificate verify_pi(const PoincareContext& ctx, const ComplexMatrix& x,
                                const PiOptions& options) {
  const double c = pi_constant(ctx, options);
  const double p = options.p.value();
  const LpExponent q_expected =
      options.mode == PiMode::lip_infinity ? LpExponent::infinity() : options.p;
  if (options.q && !(*options.q == q_expected))
    throw DomainError("PI: only q = p (or q = infinity in lip_infinity mode) is certified");
  if (x.rows() != ctx.layout().dim() || !ctx.layout().contains(x, 1e-12))
    throw DomainError("PI: element does not belong to the algebra");

  const Generator& l = ctx.generator;
  const ConditionalExpectation& e = ctx.expectation();
  double lhs = 0.0;
  double rhs = 0.0;
  switch (options.mode) {
    case PiMode::tracial_sa: {
      require_tau(ctx, "PI tracial_sa");
      require_self_adjoint(x, "PI tracial_sa");
      lhs = schatten_norm(x - e.apply(x), options.p, TraceMode::normalized);
      rhs = c * sqrt_norm(gradient_form(l, x, x), p, TraceMode::normalized);
      break;
    }
    case PiMode::haagerup_sa:
    case PiMode::haagerup_general:
    case PiMode::lip_infinity: {
      require_gns(ctx, "PI");
      if (options.mode == PiMode::haagerup_sa) require_self_adjoint(x, "PI haagerup_sa");
      const KosakiIndex idx(options.p, options.eta, ctx.state);
      const ComplexMatrix a = kosaki_embed(x, idx);
      lhs = schatten_norm(a - lp_conditional(a, idx, e), options.p, TraceMode::unnormalized);
      if (options.mode == PiMode::lip_infinity) {
        rhs = c * lipschitz_seminorm(l, x);
      } else {
        rhs = sqrt_norm(gamma_p(l, a, a, idx), p, TraceMode::unnormalized);
        if (options.mode == PiMode::haagerup_general) {
          const KosakiIndex dual(options.p, 1.0 - options.eta, ctx.state);
          const ComplexMatrix ad = a.adjoint();
          rhs += sqrt_norm(gamma_p(l, ad, ad, dual), p, TraceMode::unnormalized);
        }
        rhs *= c;
      }
      break;
    }
  }
  // Fixed points: the left side is roundoff.
  if ((x - e.apply(x)).norm() <= 1e-12 * (1.0 + x.norm())) lhs = 0.0;
  InequalityCertificate cert = make_certificate(std::string("pi:") + to_string(options.mode),
                                                ctx.model, lhs, rhs, c, options.tol);
  cert.p = options.p;
  cert.q = q_expected;
  cert.mode = to_string(options.mode);
  return cert;
}

// ------------------------------------------------------------------ Klein

double klein_phi(double s, double p) {
  return (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) * std::pow(std::abs(s), p / 2.0);
}

double klein_psi(double s, double p) {
  if (p == 2.0) return 1.0;
  return (p / 2.0) * (p / 2.0) * std::pow(std::abs(s), p - 2.0);
}

namespace {

void require_klein_exponent(double p, const char* what) {
  if (!(p == 2.0 || p >= 3.0) || !std::isfinite(p)) {
    std::ostringstream os;
    os << what << ": p must be 2 or at least 3, got " << p;
    throw DomainError(os.str());
  }
}

}  // namespace

InequalityCertificate klein_check(const HermitianMatrix& x, const HermitianMatrix& y, double p) {
  require_klein_exponent(p, "klein_check");
  if (x.dim() != y.dim()) throw DomainError("klein_check: dimension mismatch");
  auto phi = [p](double s) { return klein_phi(s, p); };
  auto psi = [p](double s) { return klein_psi(s, p); };
  const ComplexMatrix dphi = func_calc(x, phi).matrix() - func_calc(y, phi).matrix();
  const ComplexMatrix dx = x.matrix() - y.matrix();
  const ComplexMatrix w = func_calc(x, psi).matrix() + func_calc(y, psi).matrix();
  const double lhs = normalized_trace(dphi * dphi).real();
  const double rhs = 0.5 * normalized_trace(dx * dx * w).real();
  std::ostringstream model;
  model << "matrix(d=" << x.dim() << ")";
  InequalityCertificate cert = make_certificate("klein", model.str(), lhs, rhs);
  cert.p = LpExponent(p);
  return cert;
}

InequalityCertificate convex_chain_check(const PoincareContext& ctx, const HermitianMatrix& x,
                                         double p) {
  require_klein_exponent(p, "convex_chain_check");
  require_tau(ctx, "convex_chain_check");
  const ComplexMatrix fx = func_calc(x, [p](double s) { return klein_phi(s, p); }).matrix();
  const ComplexMatrix wx = func_calc(x, [p](double s) { return klein_psi(s, p); }).matrix();
  const double lhs = dirichlet_form(ctx.generator, fx);
  const double rhs = normalized_trace(gradient_form(ctx.generator, x.matrix(), x.matrix()) * wx).real();
  InequalityCertificate cert = make_certificate("convex_chain", ctx.model, lhs, rhs);
  cert.p = LpExponent(p);
  return cert;
}

// ---------------------------------------------------------- concentration

double concentration_p_star(double alpha, double lip, double t) {
  return std::sqrt(2.0 * alpha) * t / (4.0 * std::numbers::e * lip);
}

double concentration_bound(double alpha, double lip, double t) {
  return 2.0 * std::exp(-std::sqrt(alpha) * t / (2.0 * std::sqrt(2.0) * std::numbers::e * lip));
}

ConcentrationReport concentration_certificate(const PoincareContext& ctx,
                                              const HermitianMatrix& x, double t,
                                              const std::vector<double>& chebyshev_p) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("concentration: t must be positive");
  require_gns(ctx, "concentration");
  ConcentrationReport r;
  r.t = t;
  const ComplexMatrix y = HermitianMatrix::symmetrized(x.matrix() - ctx.expectation().apply(x.matrix())).matrix();
  const SpectralDecomposition eig = herm_eig_reducible(HermitianMatrix::symmetrized(y));
  const Eigen::Index n = y.rows();
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(eig.eigenvalues(k)) <= t) e += eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
  r.tail = ctx.state.expect(ComplexMatrix::Identity(n, n) - e).real();
  r.tail = std::max(r.tail, 0.0);
  r.compressed_norm = operator_norm(e * y * e);
  r.lip = lipschitz_seminorm(ctx.generator, x.matrix());
  r.fixed_point = y.norm() <= 1e-12 * (1.0 + x.matrix().norm());

  const double alpha = ctx.alpha();
  if (r.fixed_point || std::isinf(alpha)) {
    r.fixed_point = true;
    r.bound = 0.0;
    r.pass = r.tail <= 0.0;
    r.certificate = make_certificate("concentration", ctx.model, r.tail, 0.0);
    return r;
  }
  r.p_star = concentration_p_star(alpha, r.lip, t);
  r.bound = concentration_bound(alpha, r.lip, t);
  r.in_regime = r.p_star >= 3.0;
  r.chebyshev_optimal =
      2.0 * std::exp(r.p_star * std::log(4.0 * r.p_star * r.lip / (std::sqrt(2.0 * alpha) * t)));
  for (double p : chebyshev_p) {
    const double norm = kosaki_norm(y, KosakiIndex(LpExponent(p), 0.5, ctx.state));
    const double value = norm > 0.0 ? 2.0 * std::exp(p * (std::log(norm) - std::log(t / 4.0))) : 0.0;
    r.chebyshev.push_back({p, value});
  }
  r.certificate = make_certificate("concentration", ctx.model, r.tail, r.bound);
  r.certificate.advisory = !r.in_regime;
  r.pass = !r.in_regime || r.certificate.pass;
  return r;
}

// --------------------------------------------------------------- diameter

DiameterReport diameter_check(const PoincareContext& ctx, int samples, std::uint64_t seed) {
  if (samples < 0) throw DomainError("diameter_check: negative sample count");
  require_gns(ctx, "diameter_check");
  DiameterReport r;
  r.lambda_min = ctx.state.lambda_min();
  r.log_inverse_lambda_min = -std::log(r.lambda_min);
  r.advisory = r.log_inverse_lambda_min <= 3.0;
  const double alpha = ctx.alpha();
  r.diameter = std::isinf(alpha) ? 0.0
                                 : std::numbers::e * r.log_inverse_lambda_min / std::sqrt(2.0 * alpha);
  Rng rng(seed);
  bool all = true;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = random_hermitian(rng, ctx.layout()).matrix();
    const double lhs = operator_norm(x - ctx.expectation().apply(x));
    const double rhs = r.diameter * lipschitz_seminorm(ctx.generator, x);
    InequalityCertificate c = make_certificate("diameter", ctx.model, lhs, rhs, r.diameter);
    c.seed = seed;
    c.sample = s;
    c.p = LpExponent::infinity();
    c.advisory = r.advisory;
    r.max_ratio = std::max(r.max_ratio, c.ratio);
    all = all && c.pass;
    r.certificates.push_back(std::move(c));
  }
  r.pass = r.advisory || all;
  return r;
}

// -------------------------------------------------------------- Talagrand

double relative_entropy(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DomainError("relative_entropy: dimension mismatch");
  const SpectralDecomposition rs = herm_eig(rho);
  const SpectralDecomposition ss = herm_eig(sigma);
  if (ss.eigenvalues(0) <= kPositivityTol) {
    std::ostringstream os;
    os << "relative_entropy: reference density is singular (lambda_min " << ss.eigenvalues(0) << ")";
    throw SingularStateError(os.str(), ss.eigenvalues(0));
  }
  if (rs.eigenvalues(0) < -kPositivityTol) throw DomainError("relative_entropy: rho is not positive");
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < rs.eigenvalues.size(); ++k) {
    const double v = rs.eigenvalues(k);
    if (v > kPositivityTol) entropy += v * std::log(v);
  }
  const ComplexMatrix log_sigma = func_calc(ss, [](double v) { return std::log(v); }).matrix();
  return entropy - (rho.matrix() * log_sigma).trace().real();
}

ComplexMatrix expectation_predual(const ConditionalExpectation& e, const ComplexMatrix& rho) {
  const BlockLayout& layout = e.layout();
  const ComplexVector v = e.projector().transpose() * layout.vec(rho.transpose());
  return layout.unvec(v).transpose();
}

TalagrandReport talagrand_probe(int n, double beta) {
  if (!(beta > 0.0)) throw DomainError("talagrand_probe: beta must be positive");
  const ModelSpec model = birth_death(n, beta);
  const PoincareContext& ctx = model.context;
  TalagrandReport r;
  r.n = n;
  r.beta = beta;
  r.alpha = ctx.alpha();
  const ComplexMatrix& f = model.observables.at("f");
  const ComplexMatrix& a = model.observables.at("mu_A");
  const ComplexMatrix& b = model.observables.at("mu_B");
  r.f_value = std::abs((a * f).trace().real() - (b * f).trace().real());
  r.lip = lipschitz_seminorm(ctx.generator, f);
  r.lip_ok = r.lip <= 1.0 + 1e-12;
  const ConditionalExpectation& e = ctx.expectation();
  r.entropy_a = relative_entropy(HermitianMatrix(a), HermitianMatrix::symmetrized(expectation_predual(e, a)));
  r.entropy_b = relative_entropy(HermitianMatrix(b), HermitianMatrix::symmetrized(expectation_predual(e, b)));
  r.neg_log_mu_a = -std::log(ctx.state.expect(a).real());
  r.neg_log_mu_b = -std::log(ctx.state.expect(b).real());
  r.c_min = r.f_value / (std::sqrt(r.entropy_a) + std::sqrt(r.entropy_b));
  return r;
}

// --------------------------------------------------------- composite gaps

CompositeGapReport composite_gap_check(const PoincareContext& c1, const PoincareContext& c2) {
  require_gns(c1, "composite_gap_check");
  require_gns(c2, "composite_gap_check");
  CompositeGapReport r;
  r.alpha1 = c1.alpha();
  r.alpha2 = c2.alpha();
  r.expected = std::min(r.alpha1, r.alpha2);

  const Generator lt = tensor_generator(c1.generator, c2.generator);
  const DensityState dt = tensor_state(c1.state, c2.state);
  r.tensor_alpha = spectral_gap(lt, dt).alpha;
  const Generator ls = direct_sum_generator(c1.generator, c2.generator);
  const DensityState ds = direct_sum_state(c1.state, c2.state);
  r.sum_alpha = spectral_gap(ls, ds).alpha;
  r.tensor_residual = gap_residual(r.tensor_alpha, r.expected);
  r.sum_residual = gap_residual(r.sum_alpha, r.expected);

  const ComplexMatrix& x1 = c1.analysis.witness;
  if (x1.norm() > 0.0) {
    const Eigen::Index d2 = c2.layout().dim();
    r.tensor_decay = decay_rate(lt, dt, kron(x1, ComplexMatrix::Identity(d2, d2)));
    r.sum_decay = decay_rate(ls, ds, direct_sum(x1, ComplexMatrix::Zero(d2, d2)));
    r.tensor_decay_residual = std::abs(r.tensor_decay - r.alpha1) / std::max(1.0, r.alpha1);
    r.sum_decay_residual = std::abs(r.sum_decay - r.alpha1) / std::max(1.0, r.alpha1);
  } else {
    r.tensor_decay = r.sum_decay = 0.0;
  }
  r.pass = r.tensor_residual <= 1e-9 && r.sum_residual <= 1e-9 && r.tensor_decay_residual <= 1e-8 &&
           r.sum_decay_residual <= 1e-8;
  return r;
}

// --------------------------------------------------------- regularization

RegularizationReport regularization_check(const PoincareContext& ctx, std::vector<double> eps,
                                          int samples, std::uint64_t seed) {
  if (samples < 0) throw DomainError("regularization_check: negative sample count");
  RegularizationReport r;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  r.eps = eps;
  const double alpha = ctx.alpha();
  const FormKind form = ctx.analysis.gap.form;
  std::vector<Generator> regs;
  bool gaps_ok = true;
  for (double e : eps) {
    if (!(e > 0.0)) throw DomainError("regularization_check: eps must be positive");
    regs.push_back(regularize(ctx.generator, e));
    const double g = spectral_gap(regs.back(), ctx.state, form).alpha;
    const double expected = std::isinf(alpha) ? 1.0 / e : alpha / (1.0 + e * alpha);
    r.gap.push_back(g);
    r.expected.push_back(expected);
    r.gap_residual.push_back(std::abs(g - expected));
    gaps_ok = gaps_ok && r.gap_residual.back() <= 1e-9;
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = random_element(rng, ctx.layout());
    const ComplexMatrix lx = ctx.generator.apply(x);
    std::vector<double> row;
    for (const Generator& g : regs) row.push_back((g.apply(x) - lx).norm());
    for (std::size_t k = 1; k < row.size(); ++k)
      if (!(row[k] < row[k - 1])) ++r.monotonicity_violations;
    r.diffs.push_back(std::move(row));
  }
  r.pass = gaps_ok && r.monotonicity_violations == 0;
  return r;
}

// ------------------------------------------------------------ L^p checks

double eta_independence_check(const PoincareContext& ctx, LpExponent p, int samples,
                              std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix a = random_element(rng, ctx.layout());
    worst = std::max(worst, eta_independence_residual(ctx.generator, a, p, ctx.state));
  }
  return worst;
}

double gf_identification_check(const PoincareContext& ctx, LpExponent p, double eta, int samples,
                               std::uint64_t seed) {
  Rng rng(seed);
  const KosakiIndex idx(p, eta, ctx.state);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = random_element(rng, ctx.layout());
    const ComplexMatrix y = random_element(rng, ctx.layout());
    worst = std::max(worst, check_gf_identification(ctx.generator, x, y, idx));
  }
  return worst;
}

// ------------------------------------------------------------- Khintchine

InequalityCertificate khintchine_check(const std::vector<ComplexMatrix>& a, double p) {
  if (a.empty()) throw DomainError("khintchine_check: no coefficients");
  if (a.size() > 20) throw DomainError("khintchine_check: too many coefficients");
  if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError("khintchine_check: requires finite p >= 2");
  const Eigen::Index d = a.front().rows();
  for (const ComplexMatrix& ai : a)
    if (ai.rows() != d || ai.cols() != d) throw DomainError("khintchine_check: dimension mismatch");
  const LpExponent lp(p);
  const std::size_t n = a.size();
  const std::size_t patterns = std::size_t{1} << n;
  double mean = 0.0;
  for (std::size_t w = 0; w < patterns; ++w) {
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) s += (((w >> i) & 1u) ? -1.0 : 1.0) * a[i];
    mean += std::pow(schatten_norm(s, lp, TraceMode::unnormalized), p);
  }
  const double lhs = std::pow(mean / static_cast<double>(patterns), 1.0 / p);
  ComplexMatrix col = ComplexMatrix::Zero(d, d);
  ComplexMatrix row = ComplexMatrix::Zero(d, d);
  for (const ComplexMatrix& ai : a) {
    col += ai.adjoint() * ai;
    row += ai * ai.adjoint();
  }
  const double constant = p / std::sqrt(2.0);
  const double rhs = constant * (sqrt_norm(col, p, TraceMode::unnormalized) +
                                 sqrt_norm(row, p, TraceMode::unnormalized));
  std::ostringstream model;
  model << "rademacher(n=" << n << ",d=" << d << ")";
  InequalityCertificate cert = make_certificate("khintchine", model.str(), lhs, rhs, constant);
  cert.p = lp;
  cert.q = lp;
  return cert;
}

}  // namespace qpoincare
