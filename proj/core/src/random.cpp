#include "qpoincare/random.hpp"

#include <Eigen/QR>

namespace qpoincare {

ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(rows, cols);
  // Fill in a fixed order so results do not depend on Eigen internals.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
    }
  return a;
}

HermitianMatrix random_hermitian(Rng& rng, Eigen::Index dim) {
  return HermitianMatrix::symmetrized(random_complex(rng, dim, dim));
}

ComplexMatrix random_element(Rng& rng, const BlockLayout& layout) {
  ComplexMatrix x = ComplexMatrix::Zero(layout.dim(), layout.dim());
  for (std::size_t k = 0; k < layout.block_count(); ++k) {
    const Eigen::Index off = layout.offset(k);
    const Eigen::Index n = layout.size(k);
    x.block(off, off, n, n) = random_complex(rng, n, n);
  }
  return x;
}

HermitianMatrix random_hermitian(Rng& rng, const BlockLayout& layout) {
  return HermitianMatrix::symmetrized(random_element(rng, layout));
}

HermitianMatrix random_positive(Rng& rng, const BlockLayout& layout) {
  const ComplexMatrix g = random_element(rng, layout);
  return HermitianMatrix::symmetrized(g * g.adjoint());
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim) {
  const ComplexMatrix g = random_complex(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

HermitianMatrix random_density(Rng& rng, Eigen::Index dim, double floor) {
  std::uniform_real_distribution<double> uniform(floor, 1.0);
  RealVector p(dim);
  for (Eigen::Index k = 0; k < dim; ++k) p(k) = uniform(rng);
  p /= p.sum();
  const ComplexMatrix u = random_unitary(rng, dim);
  return HermitianMatrix::symmetrized(u * p.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace qpoincare
