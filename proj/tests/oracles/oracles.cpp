#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

Mat unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  Mat e = Mat::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat pauli_x() {
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

Mat pauli_z() {
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

Mat lindblad(const std::vector<Jump>& jumps, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const auto& [c, w] : jumps) {
    const Mat cd = c.adjoint();
    out += w * (cd * c * x + x * cd * c - 2.0 * cd * x * c);
  }
  return out;
}

Mat superop(const std::function<Mat(const Mat&)>& f, Eigen::Index d) {
  Mat s(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Mat y = f(unit(d, i, j));
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) s(r * d + c, i * d + j) = y(r, c);
    }
  return s;
}

Vec spectrum(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  Vec v = es.eigenvalues().real();
  std::sort(v.data(), v.data() + v.size());
  return v;
}

double gap(const Mat& m, double cutoff) {
  const Vec s = spectrum(m);
  const double scale = s.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff * scale) return s(i);
  return INFINITY;
}

Vec hermitian_eigenvalues(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Mat hermitian_function(const Mat& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec v = es.eigenvalues();
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f(v(i));
  return es.eigenvectors() * v.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat positive_power(const Mat& a, double r) {
  return hermitian_function(a, [r](double s) { return std::pow(s, r); });
}

double schatten(const Mat& a, double p, bool normalized) {
  Eigen::BDCSVD<Mat> svd(a);
  const Vec s = svd.singularValues();
  if (p <= 0) return s.maxCoeff();
  double sum = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) sum += std::pow(s(i), p);
  if (normalized) sum /= static_cast<double>(a.rows());
  return std::pow(sum, 1.0 / p);
}

double normalized_trace_real(const Mat& a) { return a.trace().real() / static_cast<double>(a.rows()); }

std::vector<Jump> birth_death_jumps(int n, double beta) {
  std::vector<Jump> j;
  for (int k = 0; k + 1 < n; ++k) {
    j.emplace_back(unit(n, k, k + 1), std::exp(beta / 2));
    j.emplace_back(unit(n, k + 1, k), std::exp(-beta / 2));
  }
  return j;
}

Mat thermal_state(int n, double beta) {
  Mat d = Mat::Zero(n, n);
  double z = 0;
  for (int k = 0; k < n; ++k) z += std::exp(-beta * k);
  for (int k = 0; k < n; ++k) d(k, k) = std::exp(-beta * k) / z;
  return d;
}

Mat gradient(const std::function<Mat(const Mat&)>& l, const Mat& x, const Mat& y) {
  const Mat xd = x.adjoint();
  return 0.5 * (l(xd) * y + xd * l(y) - l(xd * y));
}

}  // namespace oracle
