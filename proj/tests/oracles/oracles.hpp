#pragma once

// Reference computations for tests. Nothing here calls into the library's
// numerical routines; everything goes through Eigen or explicit formulas.

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using Jump = std::pair<Mat, double>;

Mat unit(Eigen::Index d, Eigen::Index i, Eigen::Index j);
Mat kron(const Mat& a, const Mat& b);
Mat pauli_x();
Mat pauli_z();

/// Σ w (c†c x + x c†c − 2 c† x c) evaluated literally.
Mat lindblad(const std::vector<Jump>& jumps, const Mat& x);

/// Column k of the result is the row-major vectorization of f(e_ij), k = i·d + j.
Mat superop(const std::function<Mat(const Mat&)>& f, Eigen::Index d);

/// Real parts of the eigenvalues of a general matrix, ascending.
Vec spectrum(const Mat& m);

/// Smallest spectrum value above cutoff·max|λ|.
double gap(const Mat& m, double cutoff = 1e-9);

Vec hermitian_eigenvalues(const Mat& a);
Mat hermitian_function(const Mat& a, const std::function<double(double)>& f);
Mat positive_power(const Mat& a, double r);

/// (Σσᵢ^p)^{1/p} with the sum averaged when normalized; p ≤ 0 means ∞.
double schatten(const Mat& a, double p, bool normalized);

double normalized_trace_real(const Mat& a);

/// Birth–death jumps on M_n with state e^{−βk}/Z.
std::vector<Jump> birth_death_jumps(int n, double beta);
Mat thermal_state(int n, double beta);

/// Γ(x,y) from any map L.
Mat gradient(const std::function<Mat(const Mat&)>& l, const Mat& x, const Mat& y);

}  // namespace oracle
