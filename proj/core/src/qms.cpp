#include "qpoincare/qms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "qpoincare/errors.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare {

namespace {

constexpr double kLindbladTol = 1e-10;
constexpr double kPositivitySpot = 1e-9;
constexpr double kAsymmetryTol = 1e-9;
constexpr double kKernelCutoff = 1e-9;
constexpr double kKernelSeparation = 1e-8;
constexpr std::uint64_t kSpotSeed = 0x5eedULL;

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// M(i n + k, j n + l) += s A(i, j) B(k, l): the superoperator of X ↦ A X Bᵀ
// on row-major vectorization, accumulated over nonzero entries only.
void kron_accumulate(ComplexMatrix& m, const ComplexMatrix& a, const ComplexMatrix& b, Complex s) {
  const Eigen::Index n = b.rows();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0, 0.0)) continue;
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          const Complex bkl = b(k, l);
          if (bkl == Complex(0.0, 0.0)) continue;
          m(i * n + k, j * n + l) += s * aij * bkl;
        }
    }
}

// Decoded position (block, row, col) of every vectorized index.
struct VecIndex {
  std::size_t block;
  Eigen::Index row;
  Eigen::Index col;
};

std::vector<VecIndex> decode(const BlockLayout& layout) {
  std::vector<VecIndex> out;
  out.reserve(static_cast<std::size_t>(layout.vec_dim()));
  for (std::size_t k = 0; k < layout.block_count(); ++k)
    for (Eigen::Index i = 0; i < layout.size(k); ++i)
      for (Eigen::Index j = 0; j < layout.size(k); ++j) out.push_back({k, i, j});
  return out;
}

// Index of the transpose entry within the same block.
std::vector<Eigen::Index> transpose_permutation(const BlockLayout& layout) {
  std::vector<Eigen::Index> perm;
  perm.reserve(static_cast<std::size_t>(layout.vec_dim()));
  for (std::size_t k = 0; k < layout.block_count(); ++k)
    for (Eigen::Index i = 0; i < layout.size(k); ++i)
      for (Eigen::Index j = 0; j < layout.size(k); ++j) perm.push_back(layout.index(k, j, i));
  return perm;
}

struct Frame {
  FormFrame frame;
  ComplexMatrix s;  // G^{1/2} M G^{-1/2}
  double asymmetry = 0.0;
};

Frame symmetrized_frame(const Generator& l, const DensityState& d, FormKind kind) {
  if (!(d.layout() == l.layout()))
    throw DomainError("generator and state act on different algebras");
  Frame f;
  f.frame = FormFrame::make(d, kind);
  const BlockLayout& layout = l.layout();
  f.s = sandwich_right(layout, sandwich_left(layout, l.superop(), f.frame.left, f.frame.right),
                       f.frame.left_inv, f.frame.right_inv);
  f.asymmetry = max_abs(f.s - f.s.adjoint()) / std::max(1.0, max_abs(f.s));
  return f;
}

}  // namespace

// ------------------------------------------------------------------ JumpTerm

JumpTerm::JumpTerm(ComplexMatrix op_in, double weight_in) : op(std::move(op_in)), weight(weight_in) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    std::ostringstream os;
    os << "JumpTerm: weight must be positive and finite, got " << weight;
    throw DomainError(os.str());
  }
  if (op.rows() != op.cols() || op.rows() < 1 || !op.allFinite())
    throw DomainError("JumpTerm: operator must be a finite square matrix");
}

std::vector<std::string> SymmetryTags::names() const {
  std::vector<std::string> out;
  if (has(SymmetryTag::tau_symmetric)) out.emplace_back("tau_symmetric");
  if (has(SymmetryTag::gns_db)) out.emplace_back("gns_db");
  if (has(SymmetryTag::kms_db)) out.emplace_back("kms_db");
  return out;
}

SymmetryTag SymmetryTags::parse(const std::string& name) {
  if (name == "tau_symmetric") return SymmetryTag::tau_symmetric;
  if (name == "gns_db") return SymmetryTag::gns_db;
  if (name == "kms_db") return SymmetryTag::kms_db;
  throw DomainError("unknown symmetry tag '" + name + "'");
}

// ----------------------------------------------------------------- Generator

struct Generator::Data {
  BlockLayout layout;
  std::vector<JumpTerm> jumps;
  bool has_jumps = false;
  ComplexMatrix superop;
  SymmetryTags tags;
  std::optional<DensityState> reference;
  GeneratorInvariants invariants;
};

Generator Generator::validated(std::shared_ptr<Data> d) {
  if (!d->superop.allFinite()) throw DomainError("Generator: superoperator has non-finite entries");
  Generator g(d);
  const BlockLayout& layout = d->layout;
  const double scale = 1.0 + max_abs(d->superop);

  d->invariants.unitality = (g.apply_vec(layout.vec(layout.identity()))).cwiseAbs().maxCoeff();

  Rng rng(kSpotSeed);
  for (int s = 0; s < 3; ++s) {
    const ComplexMatrix x = random_element(rng, layout);
    const ComplexMatrix lx = g.apply(x);
    const ComplexMatrix lxd = g.apply(x.adjoint());
    d->invariants.hermiticity =
        std::max(d->invariants.hermiticity, (lx.adjoint() - lxd).norm() / (1.0 + lx.norm()));
    const ComplexMatrix gam = 0.5 * (lxd * x + x.adjoint() * lx - g.apply(x.adjoint() * x));
    const SpectralDecomposition eig = herm_eig(HermitianMatrix::symmetrized(gam));
    const double top = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
    d->invariants.conditional_positivity =
        std::max(d->invariants.conditional_positivity, -eig.eigenvalues(0) / top);
  }

  if (d->invariants.unitality > kLindbladTol * scale) {
    std::ostringstream os;
    os << "Generator: L(I) != 0, residual " << d->invariants.unitality;
    throw DomainError(os.str());
  }
  if (d->invariants.hermiticity > kLindbladTol) {
    std::ostringstream os;
    os << "Generator: L does not preserve adjoints, residual " << d->invariants.hermiticity;
    throw DomainError(os.str());
  }
  if (d->invariants.conditional_positivity > kPositivitySpot) {
    std::ostringstream os;
    os << "Generator: gradient form not positive, eigenvalue "
       << -d->invariants.conditional_positivity;
    throw DomainError(os.str());
  }
  return g;
}

Generator Generator::from_jumps(std::vector<JumpTerm> jumps, Eigen::Index dim) {
  if (dim < 1) throw DomainError("gksl_generator: dimension must be positive");
  for (const JumpTerm& j : jumps)
    if (j.op.rows() != dim) {
      std::ostringstream os;
      os << "gksl_generator: jump operator of dimension " << j.op.rows() << ", expected " << dim;
      throw DomainError(os.str());
    }
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix m = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (const JumpTerm& j : jumps) {
    const ComplexMatrix cc = j.op.adjoint() * j.op;
    kron_accumulate(m, cc, id, j.weight);
    kron_accumulate(m, id, cc.transpose(), j.weight);
    kron_accumulate(m, j.op.adjoint(), j.op.transpose(), -2.0 * j.weight);
  }
  auto d = std::make_shared<Data>(Data{BlockLayout::full(dim), std::move(jumps), true, std::move(m),
                                       SymmetryTags{}, std::nullopt, {}});
  return validated(std::move(d));
}

Generator Generator::from_superop(const BlockLayout& layout, ComplexMatrix superop) {
  if (superop.rows() != layout.vec_dim() || superop.cols() != layout.vec_dim())
    throw DomainError("Generator: superoperator shape does not match the layout");
  auto d = std::make_shared<Data>(
      Data{layout, {}, false, std::move(superop), SymmetryTags{}, std::nullopt, {}});
  return validated(std::move(d));
}

Generator Generator::with_tags(SymmetryTags tags, std::optional<DensityState> reference) const {
  if (reference && !(reference->layout() == data_->layout))
    throw DomainError("Generator::with_tags: reference state acts on a different algebra");
  auto d = std::make_shared<Data>(*data_);
  d->tags = tags;
  d->reference = std::move(reference);
  return Generator(std::move(d));
}

const BlockLayout& Generator::layout() const noexcept { return data_->layout; }
Eigen::Index Generator::dim() const noexcept { return data_->layout.dim(); }
Eigen::Index Generator::vec_dim() const noexcept { return data_->layout.vec_dim(); }
const std::vector<JumpTerm>& Generator::jumps() const noexcept { return data_->jumps; }
bool Generator::has_jumps() const noexcept { return data_->has_jumps; }
const ComplexMatrix& Generator::superop() const noexcept { return data_->superop; }
SymmetryTags Generator::tags() const noexcept { return data_->tags; }
const std::optional<DensityState>& Generator::reference_state() const noexcept {
  return data_->reference;
}
const GeneratorInvariants& Generator::invariants() const noexcept { return data_->invariants; }

ComplexVector Generator::apply_vec(const ComplexVector& v) const { return data_->superop * v; }

ComplexMatrix Generator::apply(const ComplexMatrix& x) const {
  return data_->layout.unvec(apply_vec(data_->layout.vec(x)));
}

Generator gksl_generator(std::vector<JumpTerm> jumps, Eigen::Index dim) {
  return Generator::from_jumps(std::move(jumps), dim);
}

Generator projection_generator(const ConditionalExpectation& e) {
  const Eigen::Index n = e.layout().vec_dim();
  return Generator::from_superop(e.layout(), ComplexMatrix::Identity(n, n) - e.projector());
}

Generator zero_generator(const BlockLayout& layout) {
  const Eigen::Index n = layout.vec_dim();
  return Generator::from_superop(layout, ComplexMatrix::Zero(n, n))
      .with_tags({SymmetryTag::tau_symmetric}, std::nullopt);
}

ComplexMatrix semigroup_superop(const Generator& l, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "semigroup: time must be finite and nonnegative, got " << t;
    throw DomainError(os.str());
  }
  const ComplexMatrix a = -t * l.superop();
  return a.exp();
}

ComplexMatrix apply_semigroup(const Generator& l, const ComplexMatrix& x, double t) {
  const ComplexVector v = l.layout().vec(x);
  return l.layout().unvec(semigroup_superop(l, t) * v);
}

// ---------------------------------------------------------- symmetry checks

double check_tau_symmetry(const Generator& l) {
  const ComplexMatrix& m = l.superop();
  return max_abs(m - m.adjoint()) / static_cast<double>(l.dim());
}

double check_kms_db(const Generator& l, const DensityState& d) {
  if (!(d.layout() == l.layout())) throw DomainError("check_kms_db: state acts on another algebra");
  const BlockLayout& layout = l.layout();
  const ComplexMatrix& m = l.superop();
  const std::vector<Eigen::Index> perm = transpose_permutation(layout);
  const Eigen::Index n = layout.vec_dim();
  // Predual under Tr(ρ x): M_* = Π Mᵀ Π.
  ComplexMatrix pre(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      pre(i, j) = m(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(i)]);
  const ComplexMatrix root = d.power(0.5);
  return max_abs(sandwich_right(layout, pre, root, root) - sandwich_left(layout, m, root, root));
}

GnsReport gns_report(const Generator& l, const DensityState& d) {
  if (!(d.layout() == l.layout())) throw DomainError("check_gns_db: state acts on another algebra");
  const BlockLayout& layout = l.layout();
  const ComplexMatrix& m = l.superop();
  GnsReport r;
  const ComplexMatrix gm = sandwich_left(layout, m, layout.identity(), d.matrix());
  r.symmetry = max_abs(gm - gm.adjoint());
  const Complex i(0.0, 1.0);
  for (double t : {0.5, 1.0}) {
    const ComplexMatrix u = d.power(i * t);
    const ComplexMatrix ui = d.power(-i * t);
    r.commutation = std::max(
        r.commutation, max_abs(sandwich_left(layout, m, u, ui) - sandwich_right(layout, m, u, ui)));
  }
  return r;
}

double check_gns_db(const Generator& l, const DensityState& d) { return gns_report(l, d).residual(); }

// ------------------------------------------------------------ spectral gap

FormFrame FormFrame::make(const DensityState& d, FormKind kind) {
  const Eigen::Index n = d.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  switch (kind) {
    case FormKind::hs:
      return {id, id, id, id};
    case FormKind::gns:
      return {id, d.power(0.5), id, d.power(-0.5)};
    case FormKind::kms: {
      const ComplexMatrix q = d.power(0.25);
      const ComplexMatrix qi = d.power(-0.25);
      return {q, q, qi, qi};
    }
  }
  return {id, id, id, id};
}

ComplexMatrix Analysis::evolve(const BlockLayout& layout, const ComplexMatrix& x, double t) const {
  if (!(t >= 0.0)) throw DomainError("evolve: time must be nonnegative");
  const ComplexVector w = sandwich(layout, layout.vec(x), frame.left, frame.right);
  ComplexVector c = frame_eig.eigenvectors.adjoint() * w;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-t * frame_eig.eigenvalues(k));
  const ComplexVector back = frame_eig.eigenvectors * c;
  return layout.unvec(sandwich(layout, back, frame.left_inv, frame.right_inv));
}

Analysis analyze(const Generator& l, const DensityState& d, FormKind kind) {
  const Frame f = symmetrized_frame(l, d, kind);
  if (f.asymmetry >= kAsymmetryTol) {
    std::ostringstream os;
    os << "spectral_gap: generator is not self-adjoint in the " << to_string(kind)
       << " form, relative asymmetry " << f.asymmetry;
    throw DetailedBalanceError(os.str(), f.asymmetry);
  }
  SpectralDecomposition eig = herm_eig_reducible(HermitianMatrix::symmetrized(f.s));
  const RealVector& lam = eig.eigenvalues;
  const double top = lam.cwiseAbs().maxCoeff();
  if (lam(0) < -kAsymmetryTol * std::max(1.0, top)) {
    std::ostringstream os;
    os << "spectral_gap: symmetrized generator has negative eigenvalue " << lam(0);
    throw DomainError(os.str());
  }

  const double cutoff = kKernelCutoff * top;
  GapReport gap;
  gap.form = kind;
  gap.spectrum = lam;
  gap.asymmetry = f.asymmetry;
  gap.alpha = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> kernel;
  Eigen::Index alpha_index = -1;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (top == 0.0 || std::abs(lam(k)) < cutoff) {
      kernel.push_back(k);
      gap.largest_zero = std::max(gap.largest_zero, std::abs(lam(k)));
    } else if (lam(k) < gap.alpha) {
      gap.alpha = lam(k);
      alpha_index = k;
    }
  }
  gap.kernel_dim = static_cast<Eigen::Index>(kernel.size());
  if (kernel.empty()) throw DomainError("spectral_gap: generator has trivial kernel; L(I) != 0");
  if (alpha_index >= 0 && gap.alpha - gap.largest_zero < kKernelSeparation) {
    std::ostringstream os;
    os << "spectral_gap: kernel not separated; largest zero " << gap.largest_zero
       << ", smallest nonzero " << gap.alpha;
    throw KernelAmbiguityError(os.str(), gap.largest_zero, gap.alpha);
  }

  const BlockLayout& layout = l.layout();
  const Eigen::Index n = layout.vec_dim();
  ComplexMatrix left(n, gap.kernel_dim);
  ComplexMatrix right(n, gap.kernel_dim);
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const ComplexVector q = eig.eigenvectors.col(kernel[k]);
    left.col(static_cast<Eigen::Index>(k)) = sandwich(layout, q, f.frame.left_inv, f.frame.right_inv);
    right.col(static_cast<Eigen::Index>(k)) = sandwich(layout, q, f.frame.left, f.frame.right);
  }
  ConditionalExpectation e(layout, std::move(left), std::move(right), d);

  const InnerProductForm form = d.form(kind);
  ComplexMatrix witness = ComplexMatrix::Zero(layout.dim(), layout.dim());
  if (alpha_index >= 0) {
    const ComplexMatrix x = layout.unvec(
        sandwich(layout, eig.eigenvectors.col(alpha_index), f.frame.left_inv, f.frame.right_inv));
    ComplexMatrix h = x + x.adjoint();
    if (h.norm() < 1e-6 * x.norm()) h = Complex(0.0, 1.0) * (x - x.adjoint());
    h /= std::sqrt(inner_product(h, h, form).real());
    witness = HermitianMatrix::symmetrized(h).matrix();
    gap.dirichlet_alpha =
        inner_product(witness, l.apply(witness), form).real() / inner_product(witness, witness, form).real();
  } else {
    gap.dirichlet_alpha = gap.alpha;
  }
  return Analysis{std::move(gap), std::move(e), std::move(witness), f.frame, std::move(eig)};
}

GapReport spectral_gap(const Generator& l, const DensityState& d, FormKind form) {
  return analyze(l, d, form).gap;
}

ConditionalExpectation fixed_point_projection(const Generator& l, const DensityState& d) {
  return analyze(l, d, FormKind::gns).expectation;
}

// ------------------------------------------------------------------ forms

ComplexMatrix gradient_form(const Generator& l, const ComplexMatrix& x, const ComplexMatrix& y) {
  const ComplexMatrix xd = x.adjoint();
  return 0.5 * (l.apply(xd) * y + xd * l.apply(y) - l.apply(xd * y));
}

double dirichlet_form(const Generator& l, const ComplexMatrix& x) {
  return normalized_trace(x.adjoint() * l.apply(x)).real();
}

// ----------------------------------------------------------- constructions

Generator regularize_resolvent(const Generator& l, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("regularize: epsilon must be positive");
  const Eigen::Index n = l.vec_dim();
  const ComplexMatrix shifted = ComplexMatrix::Identity(n, n) + eps * l.superop();
  ComplexMatrix m = shifted.partialPivLu().solve(l.superop());
  return Generator::from_superop(l.layout(), std::move(m)).with_tags(l.tags(), l.reference_state());
}

Generator regularize(const Generator& l, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("regularize: epsilon must be positive");
  const SymmetryTags tags = l.tags();
  std::optional<FormKind> kind;
  std::optional<DensityState> state = l.reference_state();
  if (state && tags.has(SymmetryTag::gns_db)) {
    kind = FormKind::gns;
  } else if (state && tags.has(SymmetryTag::kms_db)) {
    kind = FormKind::kms;
  } else if (tags.has(SymmetryTag::tau_symmetric)) {
    kind = FormKind::hs;
    state = DensityState::tracial(l.layout());
  }
  if (!kind) return regularize_resolvent(l, eps);

  const Frame f = symmetrized_frame(l, *state, *kind);
  if (f.asymmetry >= kAsymmetryTol)
    throw DetailedBalanceError("regularize: tagged generator is not self-adjoint in its frame",
                               f.asymmetry);
  const SpectralDecomposition eig = herm_eig_reducible(HermitianMatrix::symmetrized(f.s));
  const HermitianMatrix s_eps = func_calc(eig, [eps](double v) { return v / (1.0 + eps * v); });
  const BlockLayout& layout = l.layout();
  ComplexMatrix m = sandwich_right(
      layout, sandwich_left(layout, s_eps.matrix(), f.frame.left_inv, f.frame.right_inv),
      f.frame.left, f.frame.right);
  return Generator::from_superop(layout, std::move(m)).with_tags(tags, l.reference_state());
}

namespace {

std::optional<DensityState> combine_states(const Generator& a, const Generator& b, bool tensor) {
  if (!a.reference_state() || !b.reference_state()) return std::nullopt;
  return tensor ? tensor_state(*a.reference_state(), *b.reference_state())
                : direct_sum_state(*a.reference_state(), *b.reference_state());
}

SymmetryTags combine_tags(const Generator& a, const Generator& b, bool have_state) {
  SymmetryTags t = a.tags().intersect(b.tags());
  if (have_state) return t;
  SymmetryTags only_tau;
  if (t.has(SymmetryTag::tau_symmetric)) only_tau.insert(SymmetryTag::tau_symmetric);
  return only_tau;
}

}  // namespace

Generator tensor_generator(const Generator& l1, const Generator& l2) {
  const BlockLayout layout = tensor_layout(l1.layout(), l2.layout());
  std::optional<DensityState> state = combine_states(l1, l2, true);
  const SymmetryTags tags = combine_tags(l1, l2, state.has_value());

  const Eigen::Index d2 = l2.dim();
  if (l1.has_jumps() && l2.has_jumps()) {
    const Eigen::Index d1 = l1.dim();
    const ComplexMatrix i1 = ComplexMatrix::Identity(d1, d1);
    const ComplexMatrix i2 = ComplexMatrix::Identity(d2, d2);
    auto kron = [](const ComplexMatrix& a, const ComplexMatrix& b) {
      ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return k;
    };
    std::vector<JumpTerm> jumps;
    for (const JumpTerm& j : l1.jumps()) jumps.emplace_back(kron(j.op, i2), j.weight);
    for (const JumpTerm& j : l2.jumps()) jumps.emplace_back(kron(i1, j.op), j.weight);
    return Generator::from_jumps(std::move(jumps), d1 * d2).with_tags(tags, std::move(state));
  }

  const std::vector<VecIndex> idx1 = decode(l1.layout());
  const std::vector<VecIndex> idx2 = decode(l2.layout());
  auto pos = [&](const VecIndex& a, const VecIndex& b) {
    return layout.index(a.block, a.row * d2 + b.row, a.col * d2 + b.col);
  };
  const Eigen::Index n = layout.vec_dim();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  const ComplexMatrix& m1 = l1.superop();
  const ComplexMatrix& m2 = l2.superop();
  for (Eigen::Index j = 0; j < m1.cols(); ++j)
    for (Eigen::Index i = 0; i < m1.rows(); ++i) {
      const Complex v = m1(i, j);
      if (v == Complex(0.0, 0.0)) continue;
      for (const VecIndex& b : idx2)
        m(pos(idx1[static_cast<std::size_t>(i)], b), pos(idx1[static_cast<std::size_t>(j)], b)) += v;
    }
  for (Eigen::Index q = 0; q < m2.cols(); ++q)
    for (Eigen::Index p = 0; p < m2.rows(); ++p) {
      const Complex v = m2(p, q);
      if (v == Complex(0.0, 0.0)) continue;
      for (const VecIndex& a : idx1)
        m(pos(a, idx2[static_cast<std::size_t>(p)]), pos(a, idx2[static_cast<std::size_t>(q)])) += v;
    }
  return Generator::from_superop(layout, std::move(m)).with_tags(tags, std::move(state));
}

Generator direct_sum_generator(const Generator& l1, const Generator& l2) {
  const BlockLayout layout = direct_sum_layout(l1.layout(), l2.layout());
  std::optional<DensityState> state = combine_states(l1, l2, false);
  const SymmetryTags tags = combine_tags(l1, l2, state.has_value());
  const Eigen::Index n1 = l1.vec_dim();
  const Eigen::Index n2 = l2.vec_dim();
  ComplexMatrix m = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  m.topLeftCorner(n1, n1) = l1.superop();
  m.bottomRightCorner(n2, n2) = l2.superop();
  return Generator::from_superop(layout, std::move(m)).with_tags(tags, std::move(state));
}

}  // namespace qpoincare

namespace qpoincare {

PoincareContext PoincareContext::build(std::string model, const Generator& l, const DensityState& d,
                                       FormKind form) {
  Analysis a = analyze(l, d, form);
  PoincareContext ctx{std::move(model), l, d, std::move(a), 0.0, 0.0, 0.0};
  ctx.tau_residual = check_tau_symmetry(l);
  ctx.gns_residual = check_gns_db(l, d);
  ctx.kms_residual = check_kms_db(l, d);
  return ctx;
}

}  // namespace qpoincare
