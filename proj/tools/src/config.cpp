#include "qpoincare/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qpoincare::cli {

namespace {

const std::map<std::string, std::set<std::string>>& check_params() {
  static const std::map<std::string, std::set<std::string>> params = {
      {"pi", {"mode", "p", "samples", "eta", "strict", "observable", "models"}},
      {"spectral_gap", {"expected", "tol", "models"}},
      {"gns_db", {"tol", "models"}},
      {"kms_db", {"tol", "models"}},
      {"tau_symmetry", {"tol", "models"}},
      {"eta_independence", {"p", "samples", "tol", "models"}},
      {"gf_identification", {"p", "eta", "samples", "tol", "models"}},
      {"klein", {"d", "p", "samples"}},
      {"convex_chain", {"p", "samples", "models"}},
      {"concentration", {"t", "observable", "samples", "chebyshev_p", "models"}},
      {"diameter", {"samples", "models"}},
      {"talagrand", {"n", "beta", "extremize"}},
      {"composite_gap", {"pairs"}},
      {"regularize", {"eps", "samples", "models"}},
      {"khintchine", {"n", "d", "p", "samples"}},
      {"extremize", {"p", "mode", "restarts", "iterations", "models"}},
  };
  return params;
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown field '" + it.key() + "'");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : check_params()) out.push_back(name);
    return out;
  }();
  return names;
}

ModelDescriptor parse_model(const Json& j) {
  if (!j.is_object()) throw ConfigError("model: expected an object");
  reject_unknown_keys(j, {"kind", "n", "beta", "d", "k", "seed"}, "model");
  if (!j.contains("kind")) throw ConfigError("model: missing 'kind'");
  ModelDescriptor d;
  try {
    d.kind = parse_model_kind(j.at("kind").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  d.n = get_or(j, "n", 0);
  d.beta = get_or(j, "beta", 0.0);
  d.d = get_or(j, "d", 0);
  d.k = get_or(j, "k", 0);
  d.seed = get_or<std::uint64_t>(j, "seed", 0);
  return d;
}

Json model_to_json(const ModelDescriptor& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case ModelKind::birth_death:
      j["n"] = d.n;
      j["beta"] = d.beta;
      break;
    case ModelKind::rademacher:
      j["n"] = d.n;
      j["d"] = d.d;
      j["seed"] = d.seed;
      break;
    case ModelKind::depolarizing:
      j["d"] = d.d;
      break;
    case ModelKind::random_gns_db:
      j["d"] = d.d;
      j["k"] = d.k;
      j["seed"] = d.seed;
      break;
    case ModelKind::kms_only:
      j["d"] = d.d;
      j["seed"] = d.seed;
      break;
  }
  return j;
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(j, {"schema", "seed", "name", "model", "models", "checks", "output"}, "config");
  if (!j.contains("schema")) throw ConfigError("config: missing 'schema'");
  ExperimentConfig c;
  c.schema = get_or(j, "schema", 0);
  if (c.schema != 1) throw ConfigError("config: unsupported schema " + std::to_string(c.schema));
  if (!j.contains("seed") || !j.at("seed").is_number_integer())
    throw ConfigError("config: 'seed' is mandatory and must be an integer");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.name = get_or<std::string>(j, "name", "");

  if (j.contains("model") && j.contains("models"))
    throw ConfigError("config: give either 'model' or 'models', not both");
  if (j.contains("model")) c.models.push_back(parse_model(j.at("model")));
  if (j.contains("models")) {
    if (!j.at("models").is_array()) throw ConfigError("config: 'models' must be an array");
    for (const Json& m : j.at("models")) c.models.push_back(parse_model(m));
  }

  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw ConfigError("config: 'checks' must be an array");
    for (const Json& cj : j.at("checks")) {
      if (!cj.is_object() || !cj.contains("check") || !cj.at("check").is_string())
        throw ConfigError("config: each check needs a string 'check' field");
      CheckSpec spec;
      spec.name = cj.at("check").get<std::string>();
      const auto it = check_params().find(spec.name);
      if (it == check_params().end()) throw ConfigError("config: unknown check '" + spec.name + "'");
      std::set<std::string> allowed = it->second;
      allowed.insert("check");
      reject_unknown_keys(cj, allowed, "check '" + spec.name + "'");
      spec.params = cj;
      spec.params.erase("check");
      if (spec.params.contains("models")) {
        if (!spec.params.at("models").is_array())
          throw ConfigError("check '" + spec.name + "': 'models' must be an array of indices");
        for (const Json& idx : spec.params.at("models")) {
          if (!idx.is_number_unsigned() || idx.get<std::size_t>() >= c.models.size())
            throw ConfigError("check '" + spec.name + "': model index out of range");
        }
      }
      c.checks.push_back(std::move(spec));
    }
  }

  if (j.contains("output")) {
    const Json& o = j.at("output");
    reject_unknown_keys(o, {"path", "format"}, "output");
    if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
    c.format = get_or<std::string>(o, "format", "json");
    if (c.format != "json" && c.format != "csv")
      throw ConfigError("output: format must be 'json' or 'csv'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["schema"] = c.schema;
  j["seed"] = c.seed;
  if (!c.name.empty()) j["name"] = c.name;
  Json models = Json::array();
  for (const ModelDescriptor& m : c.models) models.push_back(model_to_json(m));
  j["models"] = models;
  Json checks = Json::array();
  for (const CheckSpec& s : c.checks) {
    Json cj;
    cj["check"] = s.name;
    for (auto it = s.params.begin(); it != s.params.end(); ++it) cj[it.key()] = it.value();
    checks.push_back(cj);
  }
  j["checks"] = checks;
  if (c.output_path || c.format != "json") {
    Json o;
    if (c.output_path) o["path"] = *c.output_path;
    o["format"] = c.format;
    j["output"] = o;
  }
  return j;
}

}  // namespace qpoincare::cli
