#include "qpoincare/cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "qpoincare/cli/report.hpp"
#include "qpoincare/errors.hpp"
#include "qpoincare/extremize.hpp"
#include "qpoincare/random.hpp"

namespace qpoincare::cli {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_exponent(const std::optional<LpExponent>& p) {
  if (!p) return "null";
  if (p->is_infinite()) return "\"inf\"";
  return format_number(p->value());
}

std::string quote(const std::string& s) { return Json(s).dump(); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> numbers(const Json& params, const char* key, std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  const Json& v = params.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<double>>();
    return {v.get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T param(const Json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

int positive_count(const Json& params, const char* key, int fallback) {
  const int v = param(params, key, fallback);
  if (v < 0) throw ConfigError(std::string("field '") + key + "' must be nonnegative");
  return v;
}

class Runner {
 public:
  Runner(const ExperimentConfig& config, const std::function<void(const Record&)>& sink)
      : config_(config), sink_(sink) {}

  RunSummary run() {
    for (std::size_t ci = 0; ci < config_.checks.size(); ++ci) run_check(ci, config_.checks[ci]);
    return summary_;
  }

 private:
  const ExperimentConfig& config_;
  const std::function<void(const Record&)>& sink_;
  std::map<std::size_t, std::unique_ptr<ModelSpec>> cache_;
  RunSummary summary_;

  const ModelSpec& model(std::size_t i) {
    auto& slot = cache_[i];
    if (!slot) slot = std::make_unique<ModelSpec>(realize(config_.models.at(i)));
    return *slot;
  }

  std::vector<std::size_t> targets(const Json& params) const {
    std::vector<std::size_t> out;
    if (params.contains("models")) {
      for (const Json& j : params.at("models")) out.push_back(j.get<std::size_t>());
    } else {
      for (std::size_t i = 0; i < config_.models.size(); ++i) out.push_back(i);
    }
    return out;
  }

  void emit(const std::string& check, InequalityCertificate cert,
            std::vector<std::pair<std::string, double>> extras = {}) {
    ++summary_.records;
    if (cert.advisory) ++summary_.advisories;
    else if (!cert.pass) ++summary_.failures;
    sink_(Record{check, std::move(cert), std::move(extras)});
  }

  // Missing detailed balance becomes a failing certificate rather than an error.
  template <class F>
  void guarded(const std::string& check, const std::string& model_name, F&& body) {
    try {
      body();
    } catch (const DetailedBalanceError& e) {
      InequalityCertificate c =
          residual_certificate(check + ":precondition", model_name, e.residual(), kCertificateTol);
      c.pass = false;
      emit(check, std::move(c));
    }
  }

  void run_check(std::size_t ci, const CheckSpec& spec) {
    const std::string& name = spec.name;
    const Json& p = spec.params;
    if (name == "klein") return klein(ci, p);
    if (name == "talagrand") return talagrand(ci, p);
    if (name == "composite_gap") return composite(p);
    if (name == "khintchine") return khintchine(ci, p);
    for (std::size_t mi : targets(p)) {
      const ModelSpec& m = model(mi);
      guarded(name, m.name, [&] { model_check(ci, mi, m, name, p); });
    }
  }

  void model_check(std::size_t ci, std::size_t mi, const ModelSpec& m, const std::string& name,
                   const Json& p) {
    const PoincareContext& ctx = m.context;
    if (name == "pi") return pi(ci, mi, m, p);
    if (name == "spectral_gap") return spectral_gap(ctx, p);
    if (name == "gns_db" || name == "kms_db" || name == "tau_symmetry") {
      const double r = name == "gns_db" ? ctx.gns_residual
                       : name == "kms_db" ? ctx.kms_residual
                                          : ctx.tau_residual;
      return emit(name, residual_certificate(name, m.name, r, param(p, "tol", kCertificateTol)));
    }
    if (name == "eta_independence") {
      const LpExponent lp(param(p, "p", 4.0));
      const std::uint64_t seed = derive_seed(config_.seed, ci, mi);
      InequalityCertificate c = residual_certificate(
          name, m.name, eta_independence_check(ctx, lp, positive_count(p, "samples", 5), seed),
          param(p, "tol", kCertificateTol));
      c.p = lp;
      c.seed = seed;
      return emit(name, std::move(c));
    }
    if (name == "gf_identification") {
      const LpExponent lp(param(p, "p", 4.0));
      const double eta = param(p, "eta", 0.5);
      const std::uint64_t seed = derive_seed(config_.seed, ci, mi);
      InequalityCertificate c = residual_certificate(
          name, m.name,
          gf_identification_check(ctx, lp, eta, positive_count(p, "samples", 5), seed),
          param(p, "tol", kCertificateTol));
      c.p = lp;
      c.seed = seed;
      return emit(name, std::move(c), {{"eta", eta}});
    }
    if (name == "convex_chain") return convex_chain(ci, mi, m, p);
    if (name == "concentration") return concentration(ci, mi, m, p);
    if (name == "diameter") {
      const std::uint64_t seed = derive_seed(config_.seed, ci, mi);
      const DiameterReport r = diameter_check(ctx, positive_count(p, "samples", 50), seed);
      for (const InequalityCertificate& c : r.certificates)
        emit(name, c, {{"diameter", r.diameter}, {"lambda_min", r.lambda_min}});
      return;
    }
    if (name == "regularize") return regularize(ci, mi, m, p);
    if (name == "extremize") return extremize(ci, mi, m, p);
    throw ConfigError("unhandled check '" + name + "'");
  }

  PiMode resolve_mode(const PoincareContext& ctx, const std::string& mode) const {
    if (mode != "auto") return parse_pi_mode(mode);
    return ctx.tau_residual < 1e-9 && ctx.state.is_tracial() ? PiMode::tracial_sa : PiMode::haagerup_sa;
  }

  void pi(std::size_t ci, std::size_t mi, const ModelSpec& m, const Json& p) {
    const PoincareContext& ctx = m.context;
    PiOptions opts;
    opts.mode = resolve_mode(ctx, param<std::string>(p, "mode", "auto"));
    opts.eta = param(p, "eta", 0.5);
    opts.strict = param(p, "strict", false);
    const int samples = positive_count(p, "samples", 20);
    const std::optional<std::string> observable =
        p.contains("observable") ? std::optional<std::string>(p.at("observable").get<std::string>())
                                 : std::nullopt;
    const bool self_adjoint = opts.mode == PiMode::tracial_sa || opts.mode == PiMode::haagerup_sa;
    const std::vector<double> ps = numbers(p, "p", {2, 3, 4, 6});
    for (std::size_t k = 0; k < ps.size(); ++k) {
      opts.p = LpExponent(ps[k]);
      const std::uint64_t seed = derive_seed(config_.seed, ci, mi, k);
      if (observable) {
        const auto it = m.observables.find(*observable);
        if (it == m.observables.end())
          throw ConfigError("model " + m.name + " has no observable '" + *observable + "'");
        InequalityCertificate c = verify_pi(ctx, it->second, opts);
        c.sample = -1;
        emit("pi", std::move(c), {{"alpha", ctx.alpha()}});
      }
      Rng rng(seed);
      for (int s = 0; s < samples; ++s) {
        const ComplexMatrix x = self_adjoint ? random_hermitian(rng, ctx.layout()).matrix()
                                             : random_element(rng, ctx.layout());
        InequalityCertificate c = verify_pi(ctx, x, opts);
        c.seed = seed;
        c.sample = s;
        emit("pi", std::move(c), {{"alpha", ctx.alpha()}});
      }
    }
  }

  void spectral_gap(const PoincareContext& ctx, const Json& p) {
    const GapReport& g = ctx.analysis.gap;
    const double consistency =
        std::isinf(g.alpha) ? 0.0 : std::abs(g.alpha - g.dirichlet_alpha) / std::max(1.0, g.alpha);
    const std::vector<std::pair<std::string, double>> extras = {
        {"alpha", g.alpha}, {"kernel_dim", static_cast<double>(g.kernel_dim)}};
    emit("spectral_gap", residual_certificate("spectral_gap:rayleigh", ctx.model, consistency, kCertificateTol),
         extras);
    if (p.contains("expected")) {
      const double expected = p.at("expected").get<double>();
      const double tol = param(p, "tol", kCertificateTol);
      emit("spectral_gap",
           residual_certificate("spectral_gap:expected", ctx.model, std::abs(g.alpha - expected), tol),
           {{"alpha", g.alpha}, {"expected", expected}});
    }
  }

  void klein(std::size_t ci, const Json& p) {
    const std::vector<double> dims = numbers(p, "d", {2, 4, 8});
    const std::vector<double> ps = numbers(p, "p", {2, 3, 4, 6});
    const int samples = positive_count(p, "samples", 50);
    for (std::size_t di = 0; di < dims.size(); ++di)
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const std::uint64_t seed = derive_seed(config_.seed, ci, di, k);
        Rng rng(seed);
        const auto d = static_cast<Eigen::Index>(dims[di]);
        for (int s = 0; s < samples; ++s) {
          const HermitianMatrix x = random_hermitian(rng, d);
          const HermitianMatrix y = random_hermitian(rng, d);
          InequalityCertificate c = klein_check(x, y, ps[k]);
          c.seed = seed;
          c.sample = s;
          emit("klein", std::move(c));
        }
      }
  }

  void convex_chain(std::size_t ci, std::size_t mi, const ModelSpec& m, const Json& p) {
    const std::vector<double> ps = numbers(p, "p", {3, 4, 6});
    const int samples = positive_count(p, "samples", 20);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const std::uint64_t seed = derive_seed(config_.seed, ci, mi, k);
      Rng rng(seed);
      for (int s = 0; s < samples; ++s) {
        InequalityCertificate c = convex_chain_check(m.context, random_hermitian(rng, m.context.layout()), ps[k]);
        c.seed = seed;
        c.sample = s;
        emit("convex_chain", std::move(c));
      }
    }
  }

  void concentration(std::size_t ci, std::size_t mi, const ModelSpec& m, const Json& p) {
    const PoincareContext& ctx = m.context;
    const std::vector<double> ts = numbers(p, "t", {0.5, 1, 2, 4, 8, 16, 32});
    const std::vector<double> cheb = numbers(p, "chebyshev_p", {3, 4, 6});
    const int samples = positive_count(p, "samples", 0);
    const std::uint64_t seed = derive_seed(config_.seed, ci, mi);

    std::vector<std::pair<std::int64_t, ComplexMatrix>> xs;
    std::string obs = param<std::string>(p, "observable", "");
    if (obs.empty()) {
      for (const char* candidate : {"f", "degree_one_sa"})
        if (m.observables.count(candidate)) {
          obs = candidate;
          break;
        }
    }
    if (!obs.empty()) {
      const auto it = m.observables.find(obs);
      if (it == m.observables.end()) throw ConfigError("model " + m.name + " has no observable '" + obs + "'");
      xs.emplace_back(-1, it->second);
    }
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) xs.emplace_back(s, random_hermitian(rng, ctx.layout()).matrix());

    for (const auto& [sample, x] : xs) {
      const HermitianMatrix hx(x);
      for (double t : ts) {
        const ConcentrationReport r = concentration_certificate(ctx, hx, t, cheb);
        InequalityCertificate c = r.certificate;
        c.seed = seed;
        c.sample = sample;
        emit("concentration", c,
             {{"t", t},
              {"tail", r.tail},
              {"bound", r.bound},
              {"p_star", r.p_star},
              {"lip", r.lip},
              {"compressed_norm", r.compressed_norm},
              {"in_regime", r.in_regime ? 1.0 : 0.0}});
        for (const ChebyshevBound& b : r.chebyshev) {
          InequalityCertificate cc = make_certificate("concentration:chebyshev", ctx.model, r.tail, b.value);
          cc.p = LpExponent(b.p);
          cc.seed = seed;
          cc.sample = sample;
          emit("concentration", std::move(cc), {{"t", t}});
        }
      }
    }
  }

  void talagrand(std::size_t ci, const Json& p) {
    const std::vector<double> ns = numbers(p, "n", {4, 8, 12, 16, 20});
    const std::vector<double> betas = numbers(p, "beta", {1});
    const std::optional<Json> ext = p.contains("extremize") ? std::optional<Json>(p.at("extremize")) : std::nullopt;
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      std::optional<double> previous;
      for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        const int n = static_cast<int>(ns[ni]);
        const TalagrandReport r = talagrand_probe(n, betas[bi]);
        ModelDescriptor d;
        d.kind = ModelKind::birth_death;
        d.n = n;
        d.beta = betas[bi];
        const std::string model_name = d.label();
        const std::vector<std::pair<std::string, double>> extras = {
            {"n", n},           {"beta", betas[bi]},       {"alpha", r.alpha},
            {"f_value", r.f_value}, {"entropy_a", r.entropy_a}, {"entropy_b", r.entropy_b},
            {"c_min", r.c_min}};
        emit("talagrand", make_certificate("talagrand:lip", model_name, r.lip, 1.0), extras);
        if (previous) {
          // Strict growth: tol < 0 rejects equality.
          emit("talagrand", make_certificate("talagrand:c_min_growth", model_name, *previous, r.c_min, 1.0, -1e-12),
               extras);
        }
        previous = r.c_min;
        if (ext) {
          Budget b;
          b.restarts = param(*ext, "restarts", 1);
          b.iterations = param(*ext, "iterations", 40);
          b.seed = derive_seed(config_.seed, ci, bi, ni);
          const ExtremizerResult e = improve_talagrand_lower_bound(birth_death(n, betas[bi]), b);
          InequalityCertificate c = make_certificate("talagrand:extremizer", model_name, r.f_value, e.best_ratio);
          c.seed = b.seed;
          emit("talagrand", std::move(c),
               {{"improved", e.best_ratio},
                {"improved_c_min", e.best_ratio / (std::sqrt(r.entropy_a) + std::sqrt(r.entropy_b))},
                {"iterations", e.iterations}});
        }
      }
    }
  }

  void composite(const Json& p) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const bool grid = !p.contains("pairs") || (p.at("pairs").is_string() && p.at("pairs") == "grid");
    if (grid) {
      for (std::size_t i = 0; i < config_.models.size(); ++i)
        for (std::size_t j = 0; j < config_.models.size(); ++j)
          if (model(j).context.layout().is_full()) pairs.emplace_back(i, j);
    } else {
      for (const Json& pr : p.at("pairs")) {
        const auto ij = pr.get<std::vector<std::size_t>>();
        if (ij.size() != 2 || ij[0] >= config_.models.size() || ij[1] >= config_.models.size())
          throw ConfigError("composite_gap: pairs must be [i, j] model indices");
        pairs.emplace_back(ij[0], ij[1]);
      }
    }
    for (const auto& [i, j] : pairs) {
      const ModelSpec& a = model(i);
      const ModelSpec& b = model(j);
      const std::string name = a.name + "|" + b.name;
      guarded("composite_gap", name, [&] {
        const CompositeGapReport r = composite_gap_check(a.context, b.context);
        const std::vector<std::pair<std::string, double>> extras = {{"alpha1", r.alpha1},
                                                                    {"alpha2", r.alpha2},
                                                                    {"expected", r.expected},
                                                                    {"tensor_alpha", r.tensor_alpha},
                                                                    {"sum_alpha", r.sum_alpha},
                                                                    {"tensor_decay", r.tensor_decay},
                                                                    {"sum_decay", r.sum_decay}};
        emit("composite_gap", residual_certificate("composite_gap:tensor", name, r.tensor_residual, 1e-9), extras);
        emit("composite_gap", residual_certificate("composite_gap:sum", name, r.sum_residual, 1e-9), extras);
        emit("composite_gap",
             residual_certificate("composite_gap:tensor_decay", name, r.tensor_decay_residual, 1e-8), extras);
        emit("composite_gap", residual_certificate("composite_gap:sum_decay", name, r.sum_decay_residual, 1e-8),
             extras);
      });
    }
  }

  void regularize(std::size_t ci, std::size_t mi, const ModelSpec& m, const Json& p) {
    const std::uint64_t seed = derive_seed(config_.seed, ci, mi);
    const RegularizationReport r =
        regularization_check(m.context, numbers(p, "eps", {1, 0.1, 0.01}), positive_count(p, "samples", 20), seed);
    for (std::size_t k = 0; k < r.eps.size(); ++k) {
      InequalityCertificate c = residual_certificate("regularize:gap", m.name, r.gap_residual[k], 1e-9);
      c.seed = seed;
      c.sample = static_cast<std::int64_t>(k);
      emit("regularize", std::move(c), {{"eps", r.eps[k]}, {"gap", r.gap[k]}, {"expected", r.expected[k]}});
    }
    InequalityCertificate c = residual_certificate("regularize:convergence", m.name,
                                                   static_cast<double>(r.monotonicity_violations), 0.0);
    c.seed = seed;
    emit("regularize", std::move(c), {{"samples", static_cast<double>(r.diffs.size())}});
  }

  void khintchine(std::size_t ci, const Json& p) {
    const int n = param(p, "n", 3);
    const int d = param(p, "d", 2);
    const std::vector<double> ps = numbers(p, "p", {2, 4, 6});
    const int samples = positive_count(p, "samples", 20);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const std::uint64_t seed = derive_seed(config_.seed, ci, k);
      Rng rng(seed);
      for (int s = 0; s < samples; ++s) {
        std::vector<ComplexMatrix> a;
        for (int i = 0; i < n; ++i) a.push_back(random_complex(rng, d, d));
        InequalityCertificate c = khintchine_check(a, ps[k]);
        c.seed = seed;
        c.sample = s;
        emit("khintchine", std::move(c));
      }
    }
  }

  void extremize(std::size_t ci, std::size_t mi, const ModelSpec& m, const Json& p) {
    const PoincareContext& ctx = m.context;
    PiOptions opts;
    opts.mode = resolve_mode(ctx, param<std::string>(p, "mode", "auto"));
    Budget b;
    b.restarts = param(p, "restarts", 4);
    b.iterations = param(p, "iterations", 20);
    const std::vector<double> ps = numbers(p, "p", {2, 4});
    for (std::size_t k = 0; k < ps.size(); ++k) {
      opts.p = LpExponent(ps[k]);
      b.seed = derive_seed(config_.seed, ci, mi, k);
      const ExtremizerResult r = maximize_pi_ratio(ctx, opts, b);
      const double inv_sqrt_alpha = std::isinf(ctx.alpha()) ? 0.0 : 1.0 / std::sqrt(ctx.alpha());
      const std::vector<std::pair<std::string, double>> extras = {
          {"raw_ratio", r.best_raw_ratio},   {"constant", r.constant},
          {"inv_sqrt_alpha", inv_sqrt_alpha}, {"iterations", r.iterations},
          {"best_restart", r.best_restart},  {"red_flag", r.red_flag ? 1.0 : 0.0}};
      InequalityCertificate c = make_certificate(std::string("extremize:") + to_string(opts.mode), m.name,
                                                 r.best_ratio, 1.0, r.constant, 1e-6);
      c.p = opts.p;
      c.seed = b.seed;
      c.mode = r.method;
      emit("extremize", c, extras);
      if (ps[k] == 2.0) {
        InequalityCertificate w =
            make_certificate("extremize:eigen_witness", m.name, inv_sqrt_alpha, r.best_raw_ratio, 1.0, 1e-9);
        w.p = opts.p;
        w.seed = b.seed;
        emit("extremize", std::move(w), extras);
      }
    }
  }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix(splitmix(splitmix(splitmix(base) ^ a) ^ b) ^ c);
}

std::string to_json_line(const Record& r) {
  const InequalityCertificate& c = r.certificate;
  std::ostringstream os;
  os << "{\"check\":" << quote(r.check) << ",\"name\":" << quote(c.name) << ",\"model\":" << quote(c.model)
     << ",\"mode\":" << (c.mode.empty() ? "null" : quote(c.mode)) << ",\"p\":" << format_exponent(c.p)
     << ",\"q\":" << format_exponent(c.q) << ",\"lhs\":" << format_number(c.lhs)
     << ",\"rhs\":" << format_number(c.rhs) << ",\"constant\":" << format_number(c.constant)
     << ",\"ratio\":" << format_number(c.ratio) << ",\"margin\":" << format_number(c.margin)
     << ",\"rel_margin\":" << format_number(c.rel_margin) << ",\"tol\":" << format_number(c.tol)
     << ",\"pass\":" << (c.pass ? "true" : "false") << ",\"advisory\":" << (c.advisory ? "true" : "false")
     << ",\"seed\":" << c.seed << ",\"sample\":" << c.sample;
  if (!r.extras.empty()) {
    os << ",\"extras\":{";
    for (std::size_t i = 0; i < r.extras.size(); ++i)
      os << (i ? "," : "") << quote(r.extras[i].first) << ":" << format_number(r.extras[i].second);
    os << "}";
  }
  os << "}";
  return os.str();
}

RunSummary run_experiment(const ExperimentConfig& config, const std::function<void(const Record&)>& sink) {
  Runner runner(config, sink);
  return runner.run();
}

RunSummary run_to_stream(const ExperimentConfig& config, std::ostream& out) {
  if (config.format == "csv") {
    std::stringstream buffer;
    const RunSummary s = run_experiment(config, [&](const Record& r) { buffer << to_json_line(r) << '\n'; });
    write_csv(aggregate(buffer), out);
    return s;
  }
  return run_experiment(config, [&](const Record& r) { out << to_json_line(r) << '\n' << std::flush; });
}

}  // namespace qpoincare::cli
