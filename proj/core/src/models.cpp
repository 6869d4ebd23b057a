#include "qpoincare/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "qpoincare/errors.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare {

namespace {

constexpr double kModelDbTol = 1e-10;
constexpr int kMaxResamples = 64;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ComplexMatrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

void require_db(double residual, const char* what, const std::string& name) {
  if (residual >= kModelDbTol) {
    std::ostringstream os;
    os << name << ": " << what << " residual " << residual << " above " << kModelDbTol;
    throw DetailedBalanceError(os.str(), residual);
  }
}

bool connected(Eigen::Index d, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges) {
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (const auto& [a, b] : edges) parent[static_cast<std::size_t>(find(a))] = find(b);
  const Eigen::Index root = find(0);
  for (Eigen::Index i = 1; i < d; ++i)
    if (find(i) != root) return false;
  return true;
}

// Superoperator of X ↦ A X B on M_d (row-major vectorization).
ComplexMatrix sandwich_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index d = a.rows();
  ComplexMatrix m(d * d, d * d);
  const ComplexMatrix bt = b.transpose();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m.block(i * d, j * d, d, d) = a(i, j) * bt;
  return m;
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::birth_death:
      return "birth_death";
    case ModelKind::rademacher:
      return "rademacher";
    case ModelKind::depolarizing:
      return "depolarizing";
    case ModelKind::random_gns_db:
      return "random_gns_db";
    case ModelKind::kms_only:
      return "kms_only";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind k : {ModelKind::birth_death, ModelKind::rademacher, ModelKind::depolarizing,
                      ModelKind::random_gns_db, ModelKind::kms_only})
    if (name == to_string(k)) return k;
  throw DomainError("unknown model kind '" + name + "'");
}

std::string ModelDescriptor::label() const {
  std::ostringstream os;
  os << to_string(kind) << "(";
  switch (kind) {
    case ModelKind::birth_death:
      os << "n=" << n << ",beta=" << fmt_double(beta);
      break;
    case ModelKind::rademacher:
      os << "n=" << n << ",d=" << d;
      break;
    case ModelKind::depolarizing:
      os << "d=" << d;
      break;
    case ModelKind::random_gns_db:
      os << "d=" << d << ",k=" << k << ",seed=" << seed;
      break;
    case ModelKind::kms_only:
      os << "d=" << d << ",seed=" << seed;
      break;
  }
  os << ")";
  return os.str();
}

ModelSpec birth_death(int n, double beta) {
  if (n < 2) throw DomainError("birth_death: chain length must be at least 2");
  if (!std::isfinite(beta)) throw DomainError("birth_death: beta must be finite");
  ModelDescriptor desc;
  desc.kind = ModelKind::birth_death;
  desc.n = n;
  desc.beta = beta;
  const std::string name = desc.label();

  std::vector<JumpTerm> jumps;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    jumps.emplace_back(unit(n, j, j + 1), std::exp(beta / 2.0));
    jumps.emplace_back(unit(n, j + 1, j), std::exp(-beta / 2.0));
  }
  RealVector weights(n);
  for (Eigen::Index k = 0; k < n; ++k) weights(k) = std::exp(-beta * static_cast<double>(k + 1));
  const DensityState mu = DensityState::diagonal(weights);

  SymmetryTags tags{SymmetryTag::gns_db, SymmetryTag::kms_db};
  if (beta == 0.0) tags.insert(SymmetryTag::tau_symmetric);
  const Generator l = gksl_generator(std::move(jumps), n).with_tags(tags, mu);
  require_db(check_gns_db(l, mu), "GNS detailed balance", name);

  ModelSpec spec{desc, name, PoincareContext::build(name, l, mu), {}, 0};
  const double scale = std::sqrt(2.0 * n * std::cosh(beta / 2.0));
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) f(j, j) = static_cast<double>(j + 1) / scale;
  spec.observables["f"] = f;
  spec.observables["mu_A"] = unit(n, 0, 0);
  spec.observables["mu_B"] = unit(n, n - 1, n - 1);
  return spec;
}

ModelSpec rademacher(int n, int d, std::vector<ComplexMatrix> coefficients,
                     std::optional<ComplexMatrix> matrix_state, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("rademacher: n and d must be positive");
  if (n > 20) throw DomainError("rademacher: too many coordinates");
  const Eigen::Index blocks = Eigen::Index{1} << n;
  if (blocks * d > kRademacherMaxDim || blocks * d * d > kRademacherMaxVecDim) {
    std::ostringstream os;
    os << "rademacher: 2^n*d = " << blocks * d << " and 2^n*d^2 = " << blocks * d * d
       << " exceed the budget " << kRademacherMaxDim << " / " << kRademacherMaxVecDim;
    throw DomainError(os.str());
  }
  Rng rng(seed);
  if (coefficients.empty())
    for (int i = 0; i < n; ++i) coefficients.push_back(random_complex(rng, d, d));
  if (static_cast<int>(coefficients.size()) != n)
    throw DomainError("rademacher: expected one coefficient per coordinate");
  for (const ComplexMatrix& c : coefficients)
    if (c.rows() != d || c.cols() != d) throw DomainError("rademacher: coefficient dimension");

  ModelDescriptor desc;
  desc.kind = ModelKind::rademacher;
  desc.n = n;
  desc.d = d;
  desc.seed = seed;
  desc.coefficients = coefficients;
  desc.state = matrix_state;
  const std::string name = desc.label();

  const BlockLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(blocks), d));
  ComplexMatrix m = ComplexMatrix::Zero(layout.vec_dim(), layout.vec_dim());
  for (int i = 0; i < n; ++i) {
    const Eigen::Index flip = Eigen::Index{1} << i;
    for (Eigen::Index w = 0; w < blocks; ++w)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          const Eigen::Index row = layout.index(static_cast<std::size_t>(w), a, b);
          m(row, row) += 0.5;
          m(row, layout.index(static_cast<std::size_t>(w ^ flip), a, b)) -= 0.5;
        }
  }

  const ComplexMatrix rho =
      matrix_state ? *matrix_state : ComplexMatrix(ComplexMatrix::Identity(d, d) / double(d));
  if (rho.rows() != d || rho.cols() != d) throw DomainError("rademacher: state dimension");
  ComplexMatrix dm = ComplexMatrix::Zero(layout.dim(), layout.dim());
  for (Eigen::Index w = 0; w < blocks; ++w)
    dm.block(w * d, w * d, d, d) = rho / static_cast<double>(blocks);
  const DensityState state(HermitianMatrix(dm), layout);

  const SymmetryTags tags{SymmetryTag::tau_symmetric, SymmetryTag::gns_db, SymmetryTag::kms_db};
  const Generator l = Generator::from_superop(layout, std::move(m)).with_tags(tags, state);
  require_db(check_gns_db(l, state), "GNS detailed balance", name);

  ModelSpec spec{desc, name, PoincareContext::build(name, l, state), {}, 0};
  ComplexMatrix x = ComplexMatrix::Zero(layout.dim(), layout.dim());
  ComplexMatrix xs = ComplexMatrix::Zero(layout.dim(), layout.dim());
  for (Eigen::Index w = 0; w < blocks; ++w)
    for (int i = 0; i < n; ++i) {
      const double eps = ((w >> i) & 1) ? -1.0 : 1.0;
      const ComplexMatrix& c = coefficients[static_cast<std::size_t>(i)];
      x.block(w * d, w * d, d, d) += eps * c;
      xs.block(w * d, w * d, d, d) += eps * 0.5 * (c + c.adjoint());
    }
  spec.observables["degree_one"] = x;
  spec.observables["degree_one_sa"] = xs;
  return spec;
}

ModelSpec depolarizing(int d) {
  if (d < 2) throw DomainError("depolarizing: dimension must be at least 2");
  ModelDescriptor desc;
  desc.kind = ModelKind::depolarizing;
  desc.d = d;
  const std::string name = desc.label();
  const DensityState tr = DensityState::tracial(BlockLayout::full(d));
  const SymmetryTags tags{SymmetryTag::tau_symmetric, SymmetryTag::gns_db, SymmetryTag::kms_db};
  const Generator l = projection_generator(ConditionalExpectation::onto_scalars(tr)).with_tags(tags, tr);
  return ModelSpec{desc, name, PoincareContext::build(name, l, tr), {}, 0};
}

ModelSpec random_gns_db(const DensityState& state, int k, std::uint64_t seed) {
  if (!state.layout().is_full()) throw DomainError("random_gns_db: state must live on a full M_d");
  const Eigen::Index d = state.dim();
  const Eigen::Index available = d * (d - 1) / 2;
  if (k < 0 || k > available) {
    std::ostringstream os;
    os << "random_gns_db: " << k << " jumps requested but only " << available
       << " matrix-unit pairs exist";
    throw DomainError(os.str());
  }
  ModelDescriptor desc;
  desc.kind = ModelKind::random_gns_db;
  desc.d = static_cast<int>(d);
  desc.k = k;
  desc.seed = seed;
  desc.state = state.matrix();
  const std::string name = desc.label();

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) pairs.emplace_back(a, b);

  Rng rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> chosen;
  std::vector<double> weights;
  int resamples = 0;
  for (;;) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pool = pairs;
    std::shuffle(pool.begin(), pool.end(), rng);
    chosen.assign(pool.begin(), pool.begin() + k);
    weights.clear();
    for (int j = 0; j < k; ++j) weights.push_back(weight(rng));
    if (k < d - 1 || connected(d, chosen) || resamples == kMaxResamples) break;
    ++resamples;
  }

  const SpectralDecomposition& eig = state.eig();
  std::vector<JumpTerm> jumps;
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const auto [a, b] = chosen[j];
    const ComplexMatrix c = eig.eigenvectors.col(a) * eig.eigenvectors.col(b).adjoint();
    const double omega = std::log(eig.eigenvalues(a) / eig.eigenvalues(b));
    jumps.emplace_back(c, std::exp(omega / 2.0) * weights[j]);
    jumps.emplace_back(c.adjoint(), std::exp(-omega / 2.0) * weights[j]);
  }
  SymmetryTags tags{SymmetryTag::gns_db, SymmetryTag::kms_db};
  if (state.is_tracial()) tags.insert(SymmetryTag::tau_symmetric);
  const Generator l = gksl_generator(std::move(jumps), d).with_tags(tags, state);
  require_db(check_gns_db(l, state), "GNS detailed balance", name);
  return ModelSpec{desc, name, PoincareContext::build(name, l, state), {}, resamples};
}

ModelSpec kms_only_counterexample(const DensityState& state, std::uint64_t seed) {
  if (!state.layout().is_full()) throw DomainError("kms_only: state must live on a full M_d");
  const Eigen::Index d = state.dim();
  ModelDescriptor desc;
  desc.kind = ModelKind::kms_only;
  desc.d = static_cast<int>(d);
  desc.seed = seed;
  desc.state = state.matrix();
  const std::string name = desc.label();

  Rng rng(seed);
  const ComplexMatrix q = state.power(0.5);
  const ComplexMatrix qi = state.power(-0.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix phi = ComplexMatrix::Zero(d * d, d * d);
  ComplexMatrix kmat = ComplexMatrix::Zero(d, d);
  for (int r = 0; r < 2; ++r) {
    const ComplexMatrix a = scale * random_complex(rng, d, d);
    const ComplexMatrix b = q * a.adjoint() * qi;
    phi += sandwich_kron(a.adjoint(), a) + sandwich_kron(b.adjoint(), b);
    kmat += a.adjoint() * a + b.adjoint() * b;
  }
  // G + G† = Φ(I) with G solving the KMS condition entrywise in D's eigenbasis.
  const SpectralDecomposition& eig = state.eig();
  const ComplexMatrix& u = eig.eigenvectors;
  const ComplexMatrix kp = u.adjoint() * kmat * u;
  ComplexMatrix gp(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      gp(i, j) = kp(i, j) / (1.0 + std::sqrt(eig.eigenvalues(j) / eig.eigenvalues(i)));
  const ComplexMatrix g = u * gp * u.adjoint();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  ComplexMatrix m = sandwich_kron(g.adjoint(), id) + sandwich_kron(id, g) - phi;

  const Generator l = Generator::from_superop(BlockLayout::full(d), std::move(m))
                          .with_tags({SymmetryTag::kms_db}, state);
  require_db(check_kms_db(l, state), "KMS detailed balance", name);
  return ModelSpec{desc, name, PoincareContext::build(name, l, state, FormKind::kms), {}, 0};
}

ModelSpec realize(const ModelDescriptor& desc) {
  auto state_or_random = [&]() {
    if (desc.state) return DensityState(HermitianMatrix(*desc.state));
    if (desc.d < 1) throw DomainError(std::string(to_string(desc.kind)) + ": dimension d required");
    Rng rng(desc.seed ^ 0x9e3779b97f4a7c15ULL);
    return DensityState(random_density(rng, desc.d));
  };
  switch (desc.kind) {
    case ModelKind::birth_death:
      return birth_death(desc.n, desc.beta);
    case ModelKind::rademacher:
      return rademacher(desc.n, desc.d, desc.coefficients, desc.state, desc.seed);
    case ModelKind::depolarizing:
      return depolarizing(desc.d);
    case ModelKind::random_gns_db:
      return random_gns_db(state_or_random(), desc.k, desc.seed);
    case ModelKind::kms_only:
      return kms_only_counterexample(state_or_random(), desc.seed);
  }
  throw DomainError("realize: unknown model kind");
}

}  // namespace qpoincare
