#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qpoincare/cli/config.hpp"
#include "qpoincare/inequalities.hpp"

namespace qpoincare::cli {

/// One line of the certificate stream.
struct Record {
  std::string check;
  InequalityCertificate certificate;
  std::vector<std::pair<std::string, double>> extras;
};

/// One JSON object on a single line, doubles at 17 significant digits.
std::string to_json_line(const Record& record);

struct RunSummary {
  std::size_t records = 0;
  std::size_t failures = 0;
  std::size_t advisories = 0;
  /// 0 when every non-advisory certificate passes, 2 otherwise.
  int exit_code() const noexcept { return failures == 0 ? 0 : 2; }
};

/// Executes the checks in config order, models in config order within each
/// check, samples in index order. Throws on operational errors.
RunSummary run_experiment(const ExperimentConfig& config, const std::function<void(const Record&)>& sink);

/// Runs and writes JSON lines (or the aggregated CSV when format is csv).
RunSummary run_to_stream(const ExperimentConfig& config, std::ostream& out);

/// Deterministic seed derivation from the config seed and call-site indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace qpoincare::cli
