#pragma once

// Reference models: birth-death chain, Rademacher semicommutative model,
// depolarizing semigroup, seeded random GNS-detailed-balanced generators and
// a KMS-symmetric generator that is not GNS-symmetric.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpoincare/qms.hpp"

namespace qpoincare {

enum class ModelKind { birth_death, rademacher, depolarizing, random_gns_db, kms_only };

const char* to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(const std::string& name);

/// Parameters of a model. Fields not used by the kind are ignored.
struct ModelDescriptor {
  ModelKind kind = ModelKind::depolarizing;
  int n = 0;
  double beta = 0.0;
  int d = 0;
  int k = 0;
  std::uint64_t seed = 0;
  /// Rademacher coefficients x₁…x_n ∈ M_d; drawn from seed when empty.
  std::vector<ComplexMatrix> coefficients;
  /// Reference density for random_gns_db and kms_only (drawn from seed when
  /// absent) and the matrix factor of the Rademacher state (I/d when absent).
  std::optional<ComplexMatrix> state;

  /// Short stable label such as "birth_death(n=8,beta=1)".
  std::string label() const;
};

struct ModelSpec {
  ModelDescriptor descriptor;
  std::string name;
  PoincareContext context;
  std::map<std::string, ComplexMatrix> observables;
  /// Disconnected random jump graphs discarded before this draw.
  int resamples = 0;
};

/// Jumps (e_{j,j+1}, e^{β/2}) and (e_{j+1,j}, e^{−β/2}) for j < n with the thermal
/// state μ_k ∝ e^{−βk}. Observables: "f" (the linear test function) and "mu_A",
/// "mu_B" (the matrix units e_11 and e_nn, densities of the end-point states).
ModelSpec birth_death(int n, double beta);

/// L = Σᵢ (Id − 𝔼ᵢ) on L^∞({±1}ⁿ) ⊗ M_d realized as 2ⁿ blocks of M_d.
/// Observable "degree_one" = Σᵢ εᵢ ⊗ xᵢ. Budget: 2ⁿ·d ≤ 128 and 2ⁿ·d² ≤ 1024.
ModelSpec rademacher(int n, int d, std::vector<ComplexMatrix> coefficients = {},
                     std::optional<ComplexMatrix> matrix_state = std::nullopt,
                     std::uint64_t seed = 0);

/// L = Id − τ(·)I on M_d.
ModelSpec depolarizing(int d);

/// k pairs of matrix units in the eigenbasis of D with seeded weights in
/// [0.5, 1.5]; each unit c with D c D^{-1} = λc enters as (c, e^{ω/2}w) and
/// (c†, e^{−ω/2}w), ω = log λ.
ModelSpec random_gns_db(const DensityState& d, int k, std::uint64_t seed);

/// KMS-symmetric, non-GNS-symmetric generator L(x) = G†x + xG − Φ(x) with
/// Φ(x) = Σ A†xA + B†xB, B = D^{1/2}A†D^{−1/2}. Analyzed in the KMS form.
ModelSpec kms_only_counterexample(const DensityState& d, std::uint64_t seed);

/// Dispatch on the descriptor kind.
ModelSpec realize(const ModelDescriptor& descriptor);

inline constexpr Eigen::Index kRademacherMaxDim = 128;
inline constexpr Eigen::Index kRademacherMaxVecDim = 1024;

}  // namespace qpoincare
