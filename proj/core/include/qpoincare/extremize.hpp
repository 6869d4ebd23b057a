#pragma once

// Multi-start projected gradient ascent over observables: worst-case
// Poincaré ratios and improved Talagrand lower bounds.

#include <cstdint>
#include <string>

#include "qpoincare/inequalities.hpp"
#include "qpoincare/models.hpp"

namespace qpoincare {

struct Budget {
  int restarts = 20;
  int iterations = 100;
  std::uint64_t seed = 0;
};

struct ExtremizerResult {
  /// Self-adjoint maximizer.
  ComplexMatrix best_x;
  /// Objective at best_x: the certificate ratio lhs/rhs for PI, the value
  /// |μ_A(x) − μ_B(x)| on the Lipschitz ball for Talagrand.
  double best_ratio = 0.0;
  /// PI only: lhs/(rhs/C), to be compared with the theorem constant C.
  double best_raw_ratio = 0.0;
  double constant = 0.0;
  int iterations = 0;
  int best_restart = 0;
  std::string method;
  std::uint64_t seed = 0;
  bool converged = false;
  /// best_ratio exceeds 1 + 1e-6: a candidate counterexample.
  bool red_flag = false;
};

/// Maximizes the verify_pi ratio over x = x†, E(x) = 0, ‖x‖_F = 1. Restart 0
/// starts at the spectral-gap eigen-element; the others at seeded random
/// elements. Ties go to the lowest restart index.
ExtremizerResult maximize_pi_ratio(const PoincareContext& ctx, const PiOptions& options,
                                   const Budget& budget = {});

/// Ascends |μ_A(x) − μ_B(x)| over x = x†, E(x) = 0, ‖x‖_Lip ≤ 1 on a
/// birth–death model, starting from the linear test function f. The search
/// runs over the diagonal subalgebra.
ExtremizerResult improve_talagrand_lower_bound(const ModelSpec& model, const Budget& budget = {});

}  // namespace qpoincare
