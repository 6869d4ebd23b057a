#pragma once

#include <cstdint>
#include <random>

#include "qpoincare/algebra.hpp"
#include "qpoincare/matcore.hpp"

namespace qpoincare {

/// Seeded engine used by every randomized routine in the library.
using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// GUE-like Hermitian matrix (A + A†)/2 with random_complex A.
HermitianMatrix random_hermitian(Rng& rng, Eigen::Index dim);

/// Block-diagonal Hermitian element of the algebra described by layout.
HermitianMatrix random_hermitian(Rng& rng, const BlockLayout& layout);

/// Block-diagonal element with Gaussian entries inside the blocks.
ComplexMatrix random_element(Rng& rng, const BlockLayout& layout);

/// Haar-distributed unitary (QR of a Gaussian matrix with the R-phase fix).
ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim);

/// Full-rank density U diag(p) U† with p drawn uniformly from [floor, 1] and
/// normalized.
HermitianMatrix random_density(Rng& rng, Eigen::Index dim, double floor = 0.05);

/// Positive semidefinite block-diagonal element G G†.
HermitianMatrix random_positive(Rng& rng, const BlockLayout& layout);

}  // namespace qpoincare
