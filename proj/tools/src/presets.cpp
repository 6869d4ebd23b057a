#include "qpoincare/cli/presets.hpp"


namespace qpoincare::cli {

namespace {

constexpr const char* kPaperExamples = R"({
  "name": "paper-examples",
  "models": [
    {"kind": "birth_death", "n": 8, "beta": 1.0},
    {"kind": "rademacher", "n": 3, "d": 2, "seed": 7},
    {"kind": "depolarizing", "d": 4}
  ],
  "checks": [
    {"check": "spectral_gap"},
    {"check": "gns_db"},
    {"check": "kms_db"},
    {"check": "pi", "mode": "auto", "p": [2, 3, 4, 6], "samples": 10},
    {"check": "pi", "mode": "haagerup_general", "p": [2, 4], "samples": 5},
    {"check": "concentration", "models": [0, 1]},
    {"check": "diameter", "samples": 20},
    {"check": "khintchine", "n": 3, "d": 2, "p": [2, 4, 6], "samples": 20},
    {"check": "talagrand", "n": [4, 8], "beta": [1.0]}
  ]
})";

constexpr const char* kGapLaws = R"({
  "name": "gap-laws",
  "models": [
    {"kind": "depolarizing", "d": 2},
    {"kind": "birth_death", "n": 2, "beta": 1.0},
    {"kind": "birth_death", "n": 3, "beta": 0.5}
  ],
  "checks": [
    {"check": "spectral_gap"},
    {"check": "composite_gap", "pairs": "grid"},
    {"check": "regularize", "eps": [1.0, 0.1, 0.01], "samples": 20}
  ]
})";

constexpr const char* kConcentrationSweep = R"({
  "name": "concentration-sweep",
  "models": [
    {"kind": "birth_death", "n": 8, "beta": 1.0},
    {"kind": "rademacher", "n": 3, "d": 2, "seed": 7}
  ],
  "checks": [
    {"check": "concentration", "t": [0.25, 0.5, 1, 2, 4, 8, 16, 32, 64], "chebyshev_p": [3, 4, 6], "samples": 5}
  ]
})";

constexpr const char* kTalagrandSweep = R"({
  "name": "talagrand-sweep",
  "checks": [
    {"check": "talagrand", "n": [4, 8, 12, 16, 20], "beta": [0.5, 1.0],
     "extremize": {"restarts": 1, "iterations": 40}}
  ]
})";

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"paper-examples", "gap-laws", "concentration-sweep",
                                                 "talagrand-sweep"};
  return names;
}

ExperimentConfig preset(const std::string& name, std::uint64_t seed) {
  const char* text = name == "paper-examples"        ? kPaperExamples
                     : name == "gap-laws"            ? kGapLaws
                     : name == "concentration-sweep" ? kConcentrationSweep
                     : name == "talagrand-sweep"     ? kTalagrandSweep
                                                     : nullptr;
  if (!text) throw ConfigError("unknown preset '" + name + "'");
  const Json j = Json::parse(text);
  Json full = {{"schema", 1}, {"seed", seed}};
  for (auto it = j.begin(); it != j.end(); ++it) full[it.key()] = it.value();
  return parse_config(full);
}

}  // namespace qpoincare::cli
