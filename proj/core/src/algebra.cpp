#include "qpoincare/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpoincare/errors.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare {

namespace {

using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kTraceTol = 1e-12;
constexpr double kSpanTol = 1e-10;
constexpr double kAxiomTol = 1e-9;
constexpr double kTiny = 1e-300;

void require_dims(const BlockLayout& layout, const ComplexMatrix& a, const char* who) {
  if (a.rows() != layout.dim() || a.cols() != layout.dim()) {
    std::ostringstream os;
    os << who << ": expected " << layout.dim() << "x" << layout.dim() << ", got " << a.rows() << "x"
       << a.cols();
    throw DomainError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- BlockLayout

BlockLayout::BlockLayout(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DomainError("BlockLayout: at least one block required");
  for (Eigen::Index s : sizes_) {
    if (s < 1) throw DomainError("BlockLayout: block sizes must be positive");
    offsets_.push_back(dim_);
    vec_offsets_.push_back(vec_dim_);
    dim_ += s;
    vec_dim_ += s * s;
  }
}

ComplexVector BlockLayout::vec(const ComplexMatrix& x) const {
  require_dims(*this, x, "BlockLayout::vec");
  if (!contains(x, 1e-12)) {
    std::ostringstream os;
    os << "BlockLayout::vec: element has off-block mass " << off_block_norm(x);
    throw DomainError(os.str());
  }
  ComplexVector v(vec_dim_);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    const Eigen::Index n = sizes_[k];
    Eigen::Map<RowMajor>(v.data() + vec_offsets_[k], n, n) =
        x.block(offsets_[k], offsets_[k], n, n);
  }
  return v;
}

ComplexMatrix BlockLayout::unvec(const ComplexVector& v) const {
  if (v.size() != vec_dim_) throw DomainError("BlockLayout::unvec: length mismatch");
  ComplexMatrix x = ComplexMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    const Eigen::Index n = sizes_[k];
    x.block(offsets_[k], offsets_[k], n, n) =
        Eigen::Map<const RowMajor>(v.data() + vec_offsets_[k], n, n);
  }
  return x;
}

double BlockLayout::off_block_norm(const ComplexMatrix& x) const {
  if (sizes_.size() == 1) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    const Eigen::Index off = offsets_[k];
    const Eigen::Index n = sizes_[k];
    total += x.block(off, 0, n, off).squaredNorm();
    total += x.block(off, off + n, n, dim_ - off - n).squaredNorm();
  }
  return std::sqrt(total);
}

bool BlockLayout::contains(const ComplexMatrix& x, double tol) const {
  if (x.rows() != dim_ || x.cols() != dim_) return false;
  return off_block_norm(x) <= tol * (1.0 + x.norm());
}

ComplexVector sandwich(const BlockLayout& layout, const ComplexVector& v, const ComplexMatrix& a,
                       const ComplexMatrix& b) {
  ComplexVector out(layout.vec_dim());
  for (std::size_t k = 0; k < layout.block_count(); ++k) {
    const Eigen::Index n = layout.size(k);
    const Eigen::Index off = layout.offset(k);
    const Eigen::Index voff = layout.vec_offset(k);
    const RowMajor x = Eigen::Map<const RowMajor>(v.data() + voff, n, n);
    Eigen::Map<RowMajor>(out.data() + voff, n, n) =
        a.block(off, off, n, n) * x * b.block(off, off, n, n);
  }
  return out;
}

ComplexMatrix sandwich_left(const BlockLayout& layout, const ComplexMatrix& m,
                            const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out.col(j) = sandwich(layout, m.col(j), a, b);
  return out;
}

ComplexMatrix sandwich_right(const BlockLayout& layout, const ComplexMatrix& m,
                             const ComplexMatrix& a, const ComplexMatrix& b) {
  // M K = (K† M†)†, and K† is X ↦ A† X B† for the Hilbert-Schmidt pairing.
  const ComplexMatrix mt = m.adjoint();
  return sandwich_left(layout, mt, a.adjoint(), b.adjoint()).adjoint();
}

ComplexMatrix sandwich_superop(const BlockLayout& layout, const ComplexMatrix& a,
                               const ComplexMatrix& b) {
  const ComplexMatrix id = ComplexMatrix::Identity(layout.vec_dim(), layout.vec_dim());
  return sandwich_left(layout, id, a, b);
}

// --------------------------------------------------------------- DensityState

struct DensityState::Data {
  HermitianMatrix matrix;
  SpectralDecomposition eig;
  BlockLayout layout;
};

DensityState::DensityState(const HermitianMatrix& d, const BlockLayout& layout) {
  if (d.dim() != layout.dim()) throw DomainError("DensityState: dimension does not match layout");
  if (!layout.contains(d.matrix(), 1e-12))
    throw DomainError("DensityState: density has entries outside the algebra blocks");
  const double tr = d.matrix().trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os.precision(17);
    os << "DensityState: trace must be 1, got " << tr;
    throw DomainError(os.str());
  }
  SpectralDecomposition eig = herm_eig_reducible(d);
  const double lmin = eig.eigenvalues(0);
  if (lmin <= kPositivityTol) {
    std::ostringstream os;
    os << "DensityState: state is not faithful, smallest eigenvalue " << lmin;
    throw SingularStateError(os.str(), lmin);
  }
  data_ = std::make_shared<const Data>(Data{d, std::move(eig), layout});
}

DensityState::DensityState(const HermitianMatrix& d) : DensityState(d, BlockLayout::full(d.dim())) {}

DensityState DensityState::tracial(const BlockLayout& layout) {
  const double n = static_cast<double>(layout.dim());
  return DensityState(HermitianMatrix::symmetrized(layout.identity() / n), layout);
}

DensityState DensityState::diagonal(const RealVector& weights) {
  if (weights.size() < 1 || (weights.array() <= 0.0).any())
    throw DomainError("DensityState::diagonal: weights must be positive");
  const RealVector p = weights / weights.sum();
  return DensityState(HermitianMatrix::symmetrized(p.cast<Complex>().asDiagonal().toDenseMatrix()));
}

const HermitianMatrix& DensityState::hermitian() const noexcept { return data_->matrix; }
const ComplexMatrix& DensityState::matrix() const noexcept { return data_->matrix.matrix(); }
const SpectralDecomposition& DensityState::eig() const noexcept { return data_->eig; }
const BlockLayout& DensityState::layout() const noexcept { return data_->layout; }
double DensityState::lambda_min() const noexcept { return data_->eig.eigenvalues(0); }
Eigen::Index DensityState::dim() const noexcept { return data_->matrix.dim(); }

ComplexMatrix DensityState::power(Complex z) const {
  if (z == Complex(0.0, 0.0)) return ComplexMatrix::Identity(dim(), dim());
  return mpow(data_->eig, z);
}

Complex DensityState::expect(const ComplexMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim()) throw DomainError("DensityState::expect: dimension");
  return (matrix() * x).trace();
}

bool DensityState::is_tracial(double tol) const {
  const RealVector& lam = data_->eig.eigenvalues;
  return lam.maxCoeff() - lam.minCoeff() <= tol;
}

InnerProductForm DensityState::form(FormKind kind) const {
  switch (kind) {
    case FormKind::hs:
      return InnerProductForm::hs();
    case FormKind::gns:
      return gns();
    case FormKind::kms:
      return kms();
  }
  return InnerProductForm::hs();
}

BlockLayout tensor_layout(const BlockLayout& a, const BlockLayout& b) {
  if (!b.is_full()) throw DomainError("tensor_layout: second factor must be a full matrix algebra");
  std::vector<Eigen::Index> sizes;
  for (Eigen::Index s : a.sizes()) sizes.push_back(s * b.dim());
  return BlockLayout(std::move(sizes));
}

BlockLayout direct_sum_layout(const BlockLayout& a, const BlockLayout& b) {
  std::vector<Eigen::Index> sizes = a.sizes();
  sizes.insert(sizes.end(), b.sizes().begin(), b.sizes().end());
  return BlockLayout(std::move(sizes));
}

DensityState tensor_state(const DensityState& a, const DensityState& b) {
  const BlockLayout layout = tensor_layout(a.layout(), b.layout());
  const Eigen::Index n1 = a.dim();
  const Eigen::Index n2 = b.dim();
  ComplexMatrix d(n1 * n2, n1 * n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j) d.block(i * n2, j * n2, n2, n2) = a.matrix()(i, j) * b.matrix();
  return DensityState(HermitianMatrix::symmetrized(d), layout);
}

DensityState direct_sum_state(const DensityState& a, const DensityState& b) {
  const BlockLayout layout = direct_sum_layout(a.layout(), b.layout());
  ComplexMatrix d = ComplexMatrix::Zero(layout.dim(), layout.dim());
  d.topLeftCorner(a.dim(), a.dim()) = 0.5 * a.matrix();
  d.bottomRightCorner(b.dim(), b.dim()) = 0.5 * b.matrix();
  return DensityState(HermitianMatrix::symmetrized(d), layout);
}

ComplexMatrix modular_flow(const DensityState& d, const ComplexMatrix& x, Complex t) {
  if (x.rows() != d.dim() || x.cols() != d.dim()) throw DomainError("modular_flow: dimension");
  if (t == Complex(0.0, 0.0)) return x;
  const Complex i(0.0, 1.0);
  return d.power(i * t) * x * d.power(-i * t);
}

// ------------------------------------------------------------ SubalgebraBasis

SubalgebraBasis::SubalgebraBasis(std::vector<ComplexMatrix> generators, InnerProductForm form)
    : generators_(std::move(generators)), form_(std::move(form)) {
  for (const ComplexMatrix& g : generators_) {
    ComplexMatrix v = g;
    const double scale = std::sqrt(std::max(inner_product(g, g, form_).real(), 0.0));
    if (scale <= kTiny) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const ComplexMatrix& b : basis_) v -= inner_product(b, v, form_) * b;
    const double nv = std::sqrt(std::max(inner_product(v, v, form_).real(), 0.0));
    if (nv <= kSpanTol * scale) continue;
    basis_.push_back(v / nv);
  }
}

ComplexMatrix SubalgebraBasis::project(const ComplexMatrix& x) const {
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const ComplexMatrix& b : basis_) out += inner_product(b, x, form_) * b;
  return out;
}

double SubalgebraBasis::distance(const ComplexMatrix& x) const {
  const double nx = x.norm();
  if (nx <= kTiny) return 0.0;
  return (x - project(x)).norm() / nx;
}

double SubalgebraBasis::closure_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    worst = std::max(worst, distance(basis_[i].adjoint()));
    for (std::size_t j = 0; j < basis_.size(); ++j)
      worst = std::max(worst, distance(basis_[i] * basis_[j]));
  }
  return worst;
}

double SubalgebraBasis::identity_residual() const {
  if (basis_.empty()) return 1.0;
  const Eigen::Index n = basis_.front().rows();
  return distance(ComplexMatrix::Identity(n, n));
}

// ----------------------------------------------------- ConditionalExpectation

namespace {

std::vector<ComplexMatrix> columns_as_matrices(const BlockLayout& layout, const ComplexMatrix& m) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(layout.unvec(m.col(j)));
  return out;
}

}  // namespace

ConditionalExpectation::ConditionalExpectation(BlockLayout layout, ComplexMatrix left,
                                               ComplexMatrix right, DensityState state)
    : layout_(std::move(layout)),
      left_(std::move(left)),
      right_(std::move(right)),
      state_(std::move(state)),
      range_(columns_as_matrices(layout_, left_), state_.gns()) {
  const Eigen::Index n = layout_.vec_dim();
  if (left_.rows() != n || right_.rows() != n || left_.cols() != right_.cols())
    throw DomainError("ConditionalExpectation: factor shapes do not match the layout");
  if (!(state_.layout() == layout_)) throw DomainError("ConditionalExpectation: state layout");

  // ‖P² − P‖_F with P = L R†: P² − P = L (R†L − I) R†.
  const Eigen::Index k = left_.cols();
  const ComplexMatrix x = right_.adjoint() * left_ - ComplexMatrix::Identity(k, k);
  const ComplexMatrix ll = left_.adjoint() * left_;
  const ComplexMatrix rr = right_.adjoint() * right_;
  const double sq = (x.adjoint() * ll * x * rr).trace().real();
  const double pnorm = std::sqrt(std::max((ll * rr).trace().real(), 0.0));
  idempotence_ = std::sqrt(std::max(sq, 0.0)) / (1.0 + pnorm);

  const ComplexVector id = layout_.vec(layout_.identity());
  unitality_ = (apply_vec(id) - id).cwiseAbs().maxCoeff();

  const ComplexVector w = layout_.vec(state_.matrix());
  state_residual_ = (right_ * (left_.adjoint() * w) - w).cwiseAbs().maxCoeff();

  if (idempotence_ > 1e-10 || unitality_ > 1e-10 || state_residual_ > 1e-10) {
    std::ostringstream os;
    os << "ConditionalExpectation: not an expectation (idempotence " << idempotence_
       << ", unitality " << unitality_ << ", state " << state_residual_ << ")";
    throw DomainError(os.str());
  }

  const Complex i(0.0, 1.0);
  for (double t : {0.3, -0.3, 1.0, -1.0}) {
    const ComplexMatrix u = state_.power(i * t);
    const ComplexMatrix ui = state_.power(-i * t);
    for (const ComplexMatrix& b : range_.orthonormal_basis()) {
      const ComplexMatrix s = u * b * ui;
      const double nb = b.norm();
      if (nb <= kTiny) continue;
      modular_residual_ = std::max(modular_residual_, (s - apply(s)).norm() / nb);
    }
  }
}

ConditionalExpectation ConditionalExpectation::from_projector(const BlockLayout& layout,
                                                              const ComplexMatrix& projector,
                                                              const DensityState& state) {
  const Eigen::Index n = layout.vec_dim();
  return ConditionalExpectation(layout, projector, ComplexMatrix::Identity(n, n), state);
}

ConditionalExpectation ConditionalExpectation::identity(const DensityState& state) {
  const Eigen::Index n = state.layout().vec_dim();
  return ConditionalExpectation(state.layout(), ComplexMatrix::Identity(n, n),
                                ComplexMatrix::Identity(n, n), state);
}

ConditionalExpectation ConditionalExpectation::onto_scalars(const DensityState& state) {
  const BlockLayout& layout = state.layout();
  ComplexMatrix left = layout.vec(layout.identity());
  ComplexMatrix right = layout.vec(state.matrix());
  return ConditionalExpectation(layout, std::move(left), std::move(right), state);
}

ComplexVector ConditionalExpectation::apply_vec(const ComplexVector& v) const {
  return left_ * (right_.adjoint() * v);
}

ComplexMatrix ConditionalExpectation::apply(const ComplexMatrix& x) const {
  return layout_.unvec(apply_vec(layout_.vec(x)));
}

ComplexMatrix ConditionalExpectation::projector() const { return left_ * right_.adjoint(); }

ExpectationReport check_expectation_axioms(const ConditionalExpectation& e, int samples,
                                           std::uint64_t seed) {
  ExpectationReport r;
  r.idempotence = e.idempotence_residual();
  r.unitality = e.unitality_residual();
  r.state_preservation = e.state_residual();

  const BlockLayout& layout = e.layout();
  const DensityState& state = e.state();
  const auto& basis = e.range().orthonormal_basis();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto range_element = [&]() {
    ComplexMatrix y = ComplexMatrix::Zero(layout.dim(), layout.dim());
    for (const ComplexMatrix& b : basis) y += Complex(normal(rng), normal(rng)) * b;
    return y;
  };
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = random_element(rng, layout);
    const ComplexMatrix y1 = range_element();
    const ComplexMatrix y2 = range_element();
    const ComplexMatrix lhs = e.apply(y1 * x * y2);
    const ComplexMatrix rhs = y1 * e.apply(x) * y2;
    const double scale = operator_norm(y1) * x.norm() * operator_norm(y2);
    if (scale > kTiny) r.bimodularity = std::max(r.bimodularity, (lhs - rhs).norm() / scale);
    const double drift = std::abs(state.expect(e.apply(x)) - state.expect(x)) / (1.0 + x.norm());
    r.state_preservation = std::max(r.state_preservation, drift);
  }

  // Choi matrix of each block-to-block component P_{lk}: M_{d_k} → M_{d_l}.
  for (std::size_t k = 0; k < layout.block_count(); ++k) {
    const Eigen::Index dk = layout.size(k);
    std::vector<ComplexMatrix> images;
    images.reserve(static_cast<std::size_t>(dk * dk));
    for (Eigen::Index a = 0; a < dk; ++a)
      for (Eigen::Index b = 0; b < dk; ++b) {
        ComplexVector unit = ComplexVector::Zero(layout.vec_dim());
        unit(layout.index(k, a, b)) = 1.0;
        images.push_back(layout.unvec(e.apply_vec(unit)));
      }
    for (std::size_t l = 0; l < layout.block_count(); ++l) {
      const Eigen::Index dl = layout.size(l);
      const Eigen::Index off = layout.offset(l);
      ComplexMatrix choi(dk * dl, dk * dl);
      for (Eigen::Index a = 0; a < dk; ++a)
        for (Eigen::Index b = 0; b < dk; ++b)
          choi.block(a * dl, b * dl, dl, dl) =
              images[static_cast<std::size_t>(a * dk + b)].block(off, off, dl, dl);
      const SpectralDecomposition eig = herm_eig(HermitianMatrix::symmetrized(choi));
      r.complete_positivity = std::max(r.complete_positivity, -eig.eigenvalues(0));
    }
  }

  r.closure = std::max(e.range().closure_residual(), e.range().identity_residual());
  r.pass = r.idempotence < kAxiomTol && r.unitality < kAxiomTol && r.bimodularity < kAxiomTol &&
           r.state_preservation < kAxiomTol && r.complete_positivity < kAxiomTol &&
           r.closure < kAxiomTol;
  return r;
}

}  // namespace qpoincare
