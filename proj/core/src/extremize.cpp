#include "qpoincare/extremize.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "qpoincare/errors.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare {

namespace {

constexpr double kFiniteDifference = 1e-5;
constexpr double kMinStep = 1e-10;
constexpr double kMaxStep = 1.0;

using Objective = std::function<double(const ComplexMatrix&)>;
using Projection = std::function<std::optional<ComplexMatrix>(const ComplexMatrix&)>;

struct Ascent {
  ComplexMatrix x;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// HS-orthonormal basis of the self-adjoint part of the algebra.
std::vector<ComplexMatrix> hermitian_basis(const BlockLayout& layout) {
  std::vector<ComplexMatrix> basis;
  const Eigen::Index n = layout.dim();
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < layout.block_count(); ++k) {
    const Eigen::Index off = layout.offset(k);
    const Eigen::Index d = layout.size(k);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i; j < d; ++j) {
        ComplexMatrix b = ComplexMatrix::Zero(n, n);
        if (i == j) {
          b(off + i, off + i) = 1.0;
          basis.push_back(std::move(b));
          continue;
        }
        b(off + i, off + j) = r;
        b(off + j, off + i) = r;
        basis.push_back(b);
        b(off + i, off + j) = Complex(0.0, r);
        b(off + j, off + i) = Complex(0.0, -r);
        basis.push_back(std::move(b));
      }
  }
  return basis;
}

void require_budget(const Budget& b) {
  if (b.restarts <= 0 || b.iterations <= 0) {
    std::ostringstream os;
    os << "extremizer budget must be positive (restarts " << b.restarts << ", iterations "
       << b.iterations << ")";
    throw DomainError(os.str());
  }
}

Ascent ascend(const ComplexMatrix& start, const Objective& f, const Projection& project,
              const std::vector<ComplexMatrix>& basis, int iterations) {
  Ascent a;
  const std::optional<ComplexMatrix> x0 = project(start);
  if (!x0) return a;
  a.x = *x0;
  a.value = f(a.x);
  double step = 0.5;
  auto eval = [&](const ComplexMatrix& y) {
    const std::optional<ComplexMatrix> py = project(y);
    return py ? f(*py) : -std::numeric_limits<double>::infinity();
  };
  for (int it = 0; it < iterations; ++it) {
    a.iterations = it + 1;
    const double scale = a.x.norm();
    const double h = kFiniteDifference * scale;
    ComplexMatrix grad = ComplexMatrix::Zero(a.x.rows(), a.x.cols());
    for (const ComplexMatrix& b : basis) {
      const double up = eval(a.x + h * b);
      const double down = eval(a.x - h * b);
      if (std::isfinite(up) && std::isfinite(down)) grad += ((up - down) / (2.0 * h)) * b;
    }
    const double gn = grad.norm();
    if (!(gn > 1e-14)) {
      a.converged = true;
      break;
    }
    bool improved = false;
    while (step >= kMinStep) {
      const std::optional<ComplexMatrix> cand = project(a.x + (step * scale / gn) * grad);
      if (cand) {
        const double v = f(*cand);
        if (v > a.value) {
          a.x = *cand;
          a.value = v;
          improved = true;
          step = std::min(2.0 * step, kMaxStep);
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) {
      a.converged = true;
      break;
    }
  }
  return a;
}

ComplexMatrix seeded_start(const BlockLayout& layout, std::uint64_t seed, int restart) {
  Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(restart));
  return random_hermitian(rng, layout).matrix();
}

}  // namespace

ExtremizerResult maximize_pi_ratio(const PoincareContext& ctx, const PiOptions& options,
                                   const Budget& budget) {
  require_budget(budget);
  const double constant = pi_constant(ctx, options);
  const ConditionalExpectation& e = ctx.expectation();
  const Projection project = [&](const ComplexMatrix& x) -> std::optional<ComplexMatrix> {
    ComplexMatrix y = HermitianMatrix::symmetrized(x - e.apply(x)).matrix();
    const double n = y.norm();
    if (!(n > 1e-12)) return std::nullopt;
    return ComplexMatrix(y / n);
  };
  const Objective ratio = [&](const ComplexMatrix& x) { return verify_pi(ctx, x, options).ratio; };
  const std::vector<ComplexMatrix> basis = hermitian_basis(ctx.layout());

  ExtremizerResult out;
  out.method = std::string("projected_gradient:") + to_string(options.mode);
  out.seed = budget.seed;
  out.constant = constant;
  out.best_ratio = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < budget.restarts; ++r) {
    const bool witness = r == 0 && ctx.analysis.witness.norm() > 0.0;
    const ComplexMatrix start = witness ? ctx.analysis.witness : seeded_start(ctx.layout(), budget.seed, r);
    const Ascent a = ascend(start, ratio, project, basis, budget.iterations);
    out.iterations += a.iterations;
    if (a.value > out.best_ratio) {
      out.best_ratio = a.value;
      out.best_x = a.x;
      out.best_restart = r;
      out.converged = a.converged;
    }
  }
  if (out.best_x.size() == 0) {
    // Every centered element vanishes: L has no nonzero spectrum.
    out.best_ratio = 0.0;
    out.best_x = ComplexMatrix::Zero(ctx.layout().dim(), ctx.layout().dim());
    out.converged = true;
  } else {
    out.best_ratio = verify_pi(ctx, out.best_x, options).ratio;
  }
  out.best_raw_ratio = out.best_ratio * constant;
  out.red_flag = out.best_ratio > 1.0 + 1e-6;
  return out;
}

ExtremizerResult improve_talagrand_lower_bound(const ModelSpec& model, const Budget& budget) {
  require_budget(budget);
  if (model.descriptor.kind != ModelKind::birth_death)
    throw DomainError("improve_talagrand_lower_bound: model must be birth_death");
  const PoincareContext& ctx = model.context;
  const ConditionalExpectation& e = ctx.expectation();
  const ComplexMatrix w = model.observables.at("mu_A") - model.observables.at("mu_B");
  const Projection center = [&](const ComplexMatrix& x) -> std::optional<ComplexMatrix> {
    ComplexMatrix y = HermitianMatrix::symmetrized(x - e.apply(x)).matrix();
    if (!(y.norm() > 1e-12)) return std::nullopt;
    return y;
  };
  const Objective value = [&](const ComplexMatrix& x) {
    return std::abs((w * x).trace().real()) / std::max(1.0, lipschitz_seminorm(ctx.generator, x));
  };
  // Search the diagonal subalgebra, which carries both end-point states.
  const Eigen::Index n = ctx.layout().dim();
  std::vector<ComplexMatrix> basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.push_back(ComplexMatrix::Zero(n, n));
    basis.back()(i, i) = 1.0;
  }
  auto diagonal_start = [&](int restart) {
    Rng rng(budget.seed * 1000003ULL + static_cast<std::uint64_t>(restart));
    std::normal_distribution<double> normal;
    ComplexMatrix x = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) x(i, i) = normal(rng);
    return x;
  };

  ExtremizerResult out;
  out.method = "projected_gradient:talagrand";
  out.seed = budget.seed;
  out.constant = 1.0;
  out.best_ratio = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < budget.restarts; ++r) {
    const ComplexMatrix start = r == 0 ? model.observables.at("f") : diagonal_start(r);
    const Ascent a = ascend(start, value, center, basis, budget.iterations);
    out.iterations += a.iterations;
    if (a.value > out.best_ratio) {
      out.best_ratio = a.value;
      out.best_x = a.x;
      out.best_restart = r;
      out.converged = a.converged;
    }
  }
  // Lipschitz-ball projection by scaling.
  out.best_x /= std::max(1.0, lipschitz_seminorm(ctx.generator, out.best_x));
  out.best_ratio = std::abs((w * out.best_x).trace().real());
  out.best_raw_ratio = out.best_ratio;
  return out;
}

}  // namespace qpoincare
