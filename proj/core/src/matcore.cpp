#include "qpoincare/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qpoincare/errors.hpp"

namespace qpoincare {

namespace {

constexpr double kJacobiThreshold = 1e-13;
constexpr int kJacobiMaxSweeps = 40;
constexpr double kClusterTol = 1e-10;
constexpr double kPhaseTol = 1e-10;
constexpr double kOverflowExponent = 700.0;

void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    std::ostringstream os;
    os << who << ": expected a nonempty square matrix, got " << a.rows() << "x" << a.cols();
    throw DomainError(os.str());
  }
}

void require_finite(const ComplexMatrix& a, const char* who) {
  if (!a.allFinite()) throw DomainError(std::string(who) + ": matrix has non-finite entries");
}

// Off-diagonal Frobenius norm.
double off_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Sort ascending (stable), re-orthonormalize numerically degenerate clusters,
// and fix eigenvector phases.
SpectralDecomposition canonicalize(RealVector values, ComplexMatrix vectors, bool orthonormalize = true) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(vectors.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  const double scale = 1.0 + (n > 0 ? out.eigenvalues.cwiseAbs().maxCoeff() : 0.0);
  Eigen::Index start = 0;
  while (orthonormalize && start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && out.eigenvalues(stop) - out.eigenvalues(stop - 1) <= kClusterTol * scale)
      ++stop;
    // Modified Gram-Schmidt, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = start; k < stop; ++k) {
        for (Eigen::Index j = start; j < k; ++j) {
          const Complex c = out.eigenvectors.col(j).dot(out.eigenvectors.col(k));
          out.eigenvectors.col(k) -= c * out.eigenvectors.col(j);
        }
        out.eigenvectors.col(k).normalize();
      }
    }
    start = stop;
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    auto v = out.eigenvectors.col(k);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > kPhaseTol) {
        const Complex phase = std::conj(v(i)) / std::abs(v(i));
        v *= phase;
        v(i) = Complex(std::abs(v(i)), 0.0);
        break;
      }
    }
  }
  return out;
}

// Jacobi rotation on the (p, q) plane: A <- J† A J, U <- U J with
// J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] where a_pq = |a_pq| e^{iφ}.
void rotate(ComplexMatrix& a, ComplexMatrix& u, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{iφ}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex j00 = c;
  const Complex j01 = s;
  const Complex j10 = -s * std::conj(phase);
  const Complex j11 = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * j00 + akq * j10;
    a(k, q) = akp * j01 + akq * j11;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(j00) * apk + std::conj(j10) * aqk;
    a(q, k) = std::conj(j01) * apk + std::conj(j11) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = Complex(app - t * mag, 0.0);
  a(q, q) = Complex(aqq + t * mag, 0.0);

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex ukp = u(k, p);
    const Complex ukq = u(k, q);
    u(k, p) = ukp * j00 + ukq * j10;
    u(k, q) = ukp * j01 + ukq * j11;
  }
}

SpectralDecomposition eigen_solver(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("herm_eig: tridiagonal QR did not converge");
  return canonicalize(solver.eigenvalues(), solver.eigenvectors());
}

}  // namespace

double hermitian_residual(const ComplexMatrix& a) {
  return (a - a.adjoint()).norm() / (1.0 + a.norm());
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
  require_square(a, "HermitianMatrix");
  require_finite(a, "HermitianMatrix");
  const double r = hermitian_residual(a);
  if (r > kHermitianTol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: relative residual " << r;
    throw NotHermitianError(os.str(), r);
  }
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& a) {
  require_square(a, "HermitianMatrix::symmetrized");
  return HermitianMatrix(0.5 * (a + a.adjoint()), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim), Trusted{});
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition jacobi_eig(const HermitianMatrix& h) {
  ComplexMatrix a = h.matrix();
  const Eigen::Index n = a.rows();
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  const double target = kJacobiThreshold * a.norm();

  int sweep = 0;
  while (off_norm(a) > target) {
    if (sweep == kJacobiMaxSweeps) {
      std::ostringstream os;
      os << "jacobi_eig: off-diagonal norm " << off_norm(a) << " above " << target << " after "
         << kJacobiMaxSweeps << " sweeps";
      throw ConvergenceError(os.str());
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, u, p, q);
    ++sweep;
  }
  return canonicalize(a.diagonal().real(), u);
}

SpectralDecomposition herm_eig(const HermitianMatrix& a) {
  if (a.dim() <= kJacobiMaxDim) return jacobi_eig(a);
  return eigen_solver(a);
}

SpectralDecomposition herm_eig_reducible(const HermitianMatrix& h) {
  const ComplexMatrix& a = h.matrix();
  const Eigen::Index n = a.rows();

  // Union-find over the nonzero pattern.
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (a(i, j) != Complex(0.0, 0.0)) {
        const Eigen::Index ri = find(i);
        const Eigen::Index rj = find(j);
        if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
      }

  std::vector<std::vector<Eigen::Index>> components;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = find(i);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<Eigen::Index>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
  }
  if (components.size() == 1) return herm_eig(h);

  RealVector values(n);
  ComplexMatrix vectors = ComplexMatrix::Zero(n, n);
  Eigen::Index col = 0;
  for (const auto& comp : components) {
    const auto m = static_cast<Eigen::Index>(comp.size());
    ComplexMatrix sub(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        sub(i, j) = a(comp[static_cast<std::size_t>(i)], comp[static_cast<std::size_t>(j)]);
    const SpectralDecomposition part = herm_eig(HermitianMatrix::symmetrized(sub));
    for (Eigen::Index k = 0; k < m; ++k, ++col) {
      values(col) = part.eigenvalues(k);
      for (Eigen::Index i = 0; i < m; ++i)
        vectors(comp[static_cast<std::size_t>(i)], col) = part.eigenvectors(i, k);
    }
  }
  // Parts have disjoint supports and are orthonormal already.
  return canonicalize(std::move(values), std::move(vectors), false);
}

HermitianMatrix func_calc(const SpectralDecomposition& eig, const RealFunction& f) {
  RealVector mapped(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) {
    const double v = f(eig.eigenvalues(k));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "func_calc: function undefined at eigenvalue " << eig.eigenvalues(k);
      throw DomainError(os.str());
    }
    mapped(k) = v;
  }
  return HermitianMatrix::symmetrized(eig.eigenvectors * mapped.cast<Complex>().asDiagonal() *
                                      eig.eigenvectors.adjoint());
}

HermitianMatrix func_calc(const HermitianMatrix& a, const RealFunction& f) {
  return func_calc(herm_eig(a), f);
}

ComplexMatrix mpow(const SpectralDecomposition& eig, Complex z, double min_eigenvalue) {
  const RealVector& lam = eig.eigenvalues;
  const double lmin = lam.minCoeff();
  if (lmin <= min_eigenvalue) {
    std::ostringstream os;
    os << "mpow: density is not positive definite, smallest eigenvalue " << lmin;
    throw SingularStateError(os.str(), lmin);
  }
  const double max_log = std::max(std::abs(std::log(lmin)), std::abs(std::log(lam.maxCoeff())));
  const double exponent = std::abs(z.real()) * max_log;
  if (exponent > kOverflowExponent) {
    std::ostringstream os;
    os << "mpow: exponent " << exponent << " exceeds the double range guard";
    throw OverflowGuardError(os.str(), exponent);
  }
  ComplexVector powered(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) powered(k) = std::exp(z * std::log(lam(k)));
  return eig.eigenvectors * powered.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix mpow(const HermitianMatrix& d, Complex z, double min_eigenvalue) {
  return mpow(herm_eig(d), z, min_eigenvalue);
}

LpExponent::LpExponent(double p) : p_(p), infinite_(false) {
  if (!std::isfinite(p) || p < 1.0) {
    std::ostringstream os;
    os << "LpExponent: p must be finite and >= 1, got " << p;
    throw DomainError(os.str());
  }
}

double LpExponent::value() const {
  if (infinite_) throw DomainError("LpExponent: infinite exponent has no finite value");
  return p_;
}

LpExponent LpExponent::scaled(double factor) const {
  if (infinite_) return *this;
  return LpExponent(p_ * factor);
}

RealVector singular_values(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double schatten_norm(const ComplexMatrix& a, LpExponent p, TraceMode mode) {
  const RealVector s = singular_values(a);
  if (s.size() == 0) return 0.0;
  if (p.is_infinite()) return s(0);
  const double pv = p.value();
  const double top = s(0);
  if (top == 0.0) return 0.0;
  // Factor out the largest singular value to avoid overflow for large p.
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) acc += std::pow(s(k) / top, pv);
  if (mode == TraceMode::normalized) acc /= static_cast<double>(a.rows());
  return top * std::pow(acc, 1.0 / pv);
}

double operator_norm(const ComplexMatrix& a) {
  const RealVector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

InnerProductForm InnerProductForm::gns(const HermitianMatrix& density) {
  const SpectralDecomposition eig = herm_eig(density);
  if (eig.eigenvalues(0) <= kPositivityTol) {
    std::ostringstream os;
    os << "GNS form: density not positive definite, smallest eigenvalue " << eig.eigenvalues(0);
    throw SingularStateError(os.str(), eig.eigenvalues(0));
  }
  return InnerProductForm(FormKind::gns, density, density.matrix());
}

InnerProductForm InnerProductForm::kms(const HermitianMatrix& density) {
  const SpectralDecomposition eig = herm_eig(density);
  ComplexMatrix root = mpow(eig, 0.5);
  return InnerProductForm(FormKind::kms, density, std::move(root));
}

const char* to_string(FormKind kind) noexcept {
  switch (kind) {
    case FormKind::hs:
      return "hs";
    case FormKind::gns:
      return "gns";
    case FormKind::kms:
      return "kms";
  }
  return "unknown";
}

Complex inner_product(const ComplexMatrix& x, const ComplexMatrix& y, const InnerProductForm& form) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DomainError("inner_product: dimension mismatch");
  switch (form.kind()) {
    case FormKind::hs:
      return (x.adjoint() * y).trace();
    case FormKind::gns:
      if (form.weight().rows() != x.rows()) throw DomainError("inner_product: density dimension");
      return (form.weight() * x.adjoint() * y).trace();
    case FormKind::kms:
      if (form.weight().rows() != x.rows()) throw DomainError("inner_product: density dimension");
      return (form.weight() * x.adjoint() * form.weight() * y).trace();
  }
  return {};
}

Complex normalized_trace(const ComplexMatrix& a) {
  return a.trace() / static_cast<double>(a.rows());
}

}  // namespace qpoincare
