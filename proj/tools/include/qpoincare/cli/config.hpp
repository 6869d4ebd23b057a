#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpoincare/models.hpp"

namespace qpoincare::cli {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckSpec {
  std::string name;
  Json params = Json::object();
};

struct ExperimentConfig {
  int schema = 1;
  std::uint64_t seed = 0;
  std::string name;
  std::vector<ModelDescriptor> models;
  std::vector<CheckSpec> checks;
  std::optional<std::string> output_path;
  std::string format = "json";
};

/// Names accepted in the "check" field, in documentation order.
const std::vector<std::string>& known_checks();

ModelDescriptor parse_model(const Json& j);
Json model_to_json(const ModelDescriptor& d);

/// Validates schema, seed, models, check names and check parameters.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
Json config_to_json(const ExperimentConfig& config);

}  // namespace qpoincare::cli
