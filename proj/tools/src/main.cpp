#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qpoincare/cli/config.hpp"
#include "qpoincare/cli/presets.hpp"
#include "qpoincare/cli/report.hpp"
#include "qpoincare/cli/runner.hpp"

namespace {

using namespace qpoincare::cli;

int run_config(const ExperimentConfig& config, const std::optional<std::string>& out_flag) {
  const std::optional<std::string> path = out_flag ? out_flag : config.output_path;
  if (!path || *path == "-") return run_to_stream(config, std::cout).exit_code();
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output '" + *path + "'");
  const RunSummary s = run_to_stream(config, out);
  out.close();
  if (!out) throw std::runtime_error("write to '" + *path + "' failed");
  return s.exit_code();
}

int report_stream(const std::string& path, bool csv) {
  Report r;
  if (path == "-") {
    r = aggregate(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stream '" + path + "'");
    r = aggregate(in);
  }
  if (csv) write_csv(r, std::cout);
  else write_table(r, std::cout);
  if (r.malformed) {
    std::cerr << "qpoincare: " << r.malformed << " malformed line(s):";
    for (std::size_t l : r.malformed_lines) std::cerr << ' ' << l;
    std::cerr << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certificates for quantum Markov semigroup inequalities"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> run_out;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config,-c", config_path, "Config file (JSON)")->required();
  run->add_option("--out,-o", run_out, "Certificate stream path, '-' for stdout");

  std::string preset_name;
  bool emit_config = false;
  std::optional<std::string> preset_out;
  std::uint64_t preset_seed = 1;
  CLI::App* pre = app.add_subcommand("preset", "Run or print a built-in config");
  pre->add_option("name", preset_name, "Preset name")->required();
  pre->add_flag("--emit-config", emit_config, "Print the config instead of running it");
  pre->add_option("--out,-o", preset_out, "Output path");
  pre->add_option("--seed", preset_seed, "Base seed");

  std::string stream_path;
  bool csv = false;
  CLI::App* rep = app.add_subcommand("report", "Aggregate a certificate stream");
  rep->add_option("stream", stream_path, "JSON-lines stream, '-' for stdin")->required();
  rep->add_flag("--csv", csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_config(load_config(config_path), run_out);
    if (*pre) {
      const ExperimentConfig config = preset(preset_name, preset_seed);
      if (!emit_config) return run_config(config, preset_out);
      const std::string text = config_to_json(config).dump(2) + "\n";
      if (!preset_out || *preset_out == "-") {
        std::cout << text;
      } else {
        std::ofstream out(*preset_out, std::ios::binary);
        if (!(out << text)) throw std::runtime_error("cannot write '" + *preset_out + "'");
      }
      return 0;
    }
    if (*rep) return report_stream(stream_path, csv);
  } catch (const std::exception& e) {
    std::cerr << "qpoincare: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
