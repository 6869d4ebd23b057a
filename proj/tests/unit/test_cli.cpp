#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qpoincare/cli/config.hpp"
#include "qpoincare/cli/presets.hpp"
#include "qpoincare/cli/report.hpp"
#include "qpoincare/cli/runner.hpp"

using namespace qpoincare::cli;

namespace {

const std::string kExe = QPOINCARE_EXE;
const std::string kTmp = QPOINCARE_TEST_TMP;

std::string path(const std::string& name) { return kTmp + "/cli_" + name; }

void write(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args, const std::string& tag) {
  const std::string cmd = kExe + " " + args + " > " + path(tag + ".stdout") + " 2> " + path(tag + ".stderr");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig parse(const std::string& text) { return parse_config(Json::parse(text)); }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_NO_THROW(parse(R"({"schema":1,"seed":3,"checks":[]})"));
  EXPECT_THROW(parse(R"({"schema":1,"checks":[]})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1.5})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":2,"seed":1})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1,"checks":[{"check":"poincare"}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1,"checks":[{"check":"pi","bogus":1}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1,"model":{"kind":"depolarizing","size":2}})"), ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1,"model":{"kind":"depolarizing","d":2},
                        "checks":[{"check":"pi","models":[1]}]})"),
               ConfigError);
  EXPECT_THROW(parse(R"({"schema":1,"seed":1,"output":{"format":"xml"}})"), ConfigError);
  const ExperimentConfig c = parse(R"({"schema":1,"seed":7,"model":{"kind":"birth_death","n":3,"beta":0.5},
                                      "checks":[{"check":"spectral_gap"}],"output":{"format":"csv"}})");
  EXPECT_EQ(c.seed, 7u);
  ASSERT_EQ(c.models.size(), 1u);
  EXPECT_EQ(c.models[0].label(), "birth_death(n=3,beta=0.5)");
  EXPECT_EQ(c.format, "csv");
  const ExperimentConfig back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
}

TEST(Runner, JsonLineRoundTripsDoubles) {
  Record r;
  r.check = "pi";
  r.certificate = qpoincare::make_certificate("pi:x", "m(a=1,b=2)", 0.1 + 0.2, 1.0 / 3.0, 2.5);
  r.certificate.p = qpoincare::LpExponent(4);
  r.certificate.q = qpoincare::LpExponent::infinity();
  r.extras = {{"alpha", 1e-300}};
  const nlohmann::json j = nlohmann::json::parse(to_json_line(r));
  EXPECT_EQ(j["lhs"].get<double>(), 0.1 + 0.2);
  EXPECT_EQ(j["rhs"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(j["q"], "inf");
  EXPECT_EQ(j["p"].get<double>(), 4.0);
  EXPECT_EQ(j["extras"]["alpha"].get<double>(), 1e-300);
  EXPECT_EQ(j["model"], "m(a=1,b=2)");
  EXPECT_EQ(to_json_line(r).find('\n'), std::string::npos);
}

TEST(Runner, SeedDerivationIsStableAndSpread) {
  EXPECT_EQ(derive_seed(1, 2, 3, 4), derive_seed(1, 2, 3, 4));
  EXPECT_NE(derive_seed(1, 2, 3, 4), derive_seed(1, 2, 4, 3));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Runner, EmptyCheckListIsEmptyStream) {
  std::ostringstream out;
  const RunSummary s = run_to_stream(parse(R"({"schema":1,"seed":1,"checks":[]})"), out);
  EXPECT_EQ(s.exit_code(), 0);
  EXPECT_TRUE(out.str().empty());
}

TEST(Runner, DeterministicStream) {
  const ExperimentConfig c = preset("paper-examples", 5);
  std::ostringstream a, b;
  run_to_stream(c, a);
  run_to_stream(c, b);
  EXPECT_FALSE(a.str().empty());
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream other;
  run_to_stream(preset("paper-examples", 6), other);
  EXPECT_NE(a.str(), other.str());
}

TEST(Report, GroupsAndSorts) {
  std::istringstream one(R"({"model":"m","name":"c","p":2,"q":2,"ratio":0.5,"margin":1.0,"pass":true})");
  const Report r1 = aggregate(one);
  ASSERT_EQ(r1.rows.size(), 1u);
  EXPECT_EQ(r1.rows[0].p, "2");

  std::istringstream mixed(
      "{\"model\":\"b\",\"name\":\"x\",\"p\":null,\"ratio\":0.5,\"margin\":0.1,\"pass\":true}\n"
      "\n"
      "{\"model\":\"a\",\"name\":\"y\",\"p\":\"inf\",\"ratio\":0.25,\"margin\":-1,\"pass\":false}\n"
      "not json\n"
      "{\"model\":\"b\",\"name\":\"x\",\"p\":null,\"ratio\":0.75,\"margin\":0.05,\"pass\":true}\n"
      "{\"model\":\"a\",\"name\":\"y\"}\n");
  const Report r = aggregate(mixed);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].model, "a");
  EXPECT_EQ(r.rows[0].p, "inf");
  EXPECT_EQ(r.rows[0].pass, 0u);
  EXPECT_EQ(r.rows[1].samples, 2u);
  EXPECT_DOUBLE_EQ(r.rows[1].max_ratio, 0.75);
  EXPECT_DOUBLE_EQ(r.rows[1].min_margin, 0.05);
  EXPECT_EQ(r.malformed, 2u);
  EXPECT_EQ(r.malformed_lines, (std::vector<std::size_t>{4, 6}));

  std::ostringstream csv;
  write_csv(r, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "model,check,p,q,samples,max_ratio,min_margin,pass");
  Report quoted;
  quoted.rows.push_back({"bd(n=2,beta=1)", "pi", "2", "2", 1, 0.5, 0.1, 1});
  std::ostringstream q;
  write_csv(quoted, q);
  EXPECT_NE(q.str().find("\"bd(n=2,beta=1)\",pi,2,2,1,"), std::string::npos);
}

TEST(Presets, Contents) {
  EXPECT_EQ(preset_names().size(), 4u);
  const ExperimentConfig pe = preset("paper-examples");
  std::vector<std::string> labels;
  for (const auto& m : pe.models) labels.push_back(m.label());
  EXPECT_EQ(labels[0], "birth_death(n=8,beta=1)");
  EXPECT_EQ(labels[1].rfind("rademacher(n=3,d=2", 0), 0u);
  EXPECT_EQ(labels[2], "depolarizing(d=4)");
  const ExperimentConfig gl = preset("gap-laws");
  bool composite = false, regularize = false;
  for (const CheckSpec& c : gl.checks) {
    composite |= c.name == "composite_gap";
    if (c.name == "regularize") {
      regularize = true;
      EXPECT_EQ(c.params.at("eps"), Json::parse("[1.0, 0.1, 0.01]"));
    }
  }
  EXPECT_TRUE(composite && regularize);
  const ExperimentConfig ts = preset("talagrand-sweep");
  EXPECT_EQ(ts.checks.at(0).params.at("n"), Json::parse("[4, 8, 12, 16, 20]"));
  EXPECT_EQ(ts.checks.at(0).params.at("beta"), Json::parse("[0.5, 1.0]"));
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Exe, EmptyChecksExitZero) {
  write(path("empty.json"), R"({"schema":1,"seed":1,"checks":[]})");
  EXPECT_EQ(run("run --config " + path("empty.json") + " --out " + path("empty.jsonl"), "empty"), 0);
  EXPECT_TRUE(slurp(path("empty.jsonl")).empty());
}

TEST(Exe, BirthDeathSuitePasses) {
  write(path("bd.json"), R"({
    "schema": 1, "seed": 11,
    "model": {"kind": "birth_death", "n": 4, "beta": 1.0},
    "checks": [
      {"check": "spectral_gap"}, {"check": "gns_db"}, {"check": "kms_db"},
      {"check": "pi", "p": [2, 3, 4, 6], "samples": 10},
      {"check": "pi", "mode": "haagerup_general", "p": [2, 3, 4, 6], "samples": 5},
      {"check": "pi", "mode": "lip_infinity", "p": [2, 4], "samples": 5},
      {"check": "eta_independence"}, {"check": "gf_identification"},
      {"check": "concentration"}, {"check": "diameter", "samples": 10},
      {"check": "regularize"}, {"check": "extremize", "restarts": 2, "iterations": 5}
    ]})");
  EXPECT_EQ(run("run --config " + path("bd.json") + " --out " + path("bd.jsonl"), "bd"), 0) << slurp(path("bd.stderr"));
  const std::string s = slurp(path("bd.jsonl"));
  std::istringstream lines(s);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j["pass"].get<bool>() || j["advisory"].get<bool>()) << line;
    ++n;
  }
  EXPECT_GT(n, 100u);
}

TEST(Exe, KmsOnlyModelFailsGnsChecks) {
  write(path("kms.json"), R"({
    "schema": 1, "seed": 2,
    "model": {"kind": "kms_only", "d": 3, "seed": 3},
    "checks": [{"check": "kms_db"}, {"check": "gns_db"}, {"check": "pi", "mode": "haagerup_sa", "samples": 2}]})");
  EXPECT_EQ(run("run --config " + path("kms.json"), "kms"), 2);
  const std::string out = slurp(path("kms.stdout"));
  std::istringstream lines(out);
  std::string line;
  bool kms_pass = false, gns_fail = false, pre_fail = false;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["name"] == "kms_db") kms_pass = j["pass"].get<bool>();
    if (j["name"] == "gns_db") gns_fail = !j["pass"].get<bool>();
    if (j["name"] == "pi:precondition") pre_fail = !j["pass"].get<bool>();
  }
  EXPECT_TRUE(kms_pass);
  EXPECT_TRUE(gns_fail);
  EXPECT_TRUE(pre_fail);
}

TEST(Exe, OperationalErrorsExitOne) {
  EXPECT_EQ(run("run --config " + path("missing.json"), "missing"), 1);
  EXPECT_NE(slurp(path("missing.stderr")).find("cannot open"), std::string::npos);
  write(path("bad.json"), R"({"schema":1,"seed":1,"checks":[{"check":"nope"}]})");
  EXPECT_EQ(run("run --config " + path("bad.json"), "bad"), 1);
  EXPECT_NE(slurp(path("bad.stderr")).find("unknown check"), std::string::npos);
  write(path("empty2.json"), R"({"schema":1,"seed":1,"checks":[]})");
  EXPECT_EQ(run("run --config " + path("empty2.json") + " --out /nonexistent-dir/x.jsonl", "io"), 1);
  EXPECT_FALSE(slurp(path("io.stderr")).empty());
  EXPECT_EQ(run("preset nope", "nopreset"), 1);
  EXPECT_EQ(run("frobnicate", "nosub"), 1);
}

TEST(Exe, PresetEmitConfigRoundTrips) {
  EXPECT_EQ(run("preset gap-laws --emit-config --seed 4", "emit"), 0);
  const ExperimentConfig c = load_config(path("emit.stdout"));
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(config_to_json(c).dump(), config_to_json(preset("gap-laws", 4)).dump());
}

TEST(Exe, ReportOnPaperExamples) {
  ASSERT_EQ(run("preset paper-examples --out " + path("pe.jsonl"), "pe"), 0);
  ASSERT_EQ(run("report --csv " + path("pe.jsonl"), "pecsv"), 0);
  const std::string csv = slurp(path("pecsv.stdout"));
  EXPECT_EQ(csv.rfind("model,check,p,q,samples,max_ratio,min_margin,pass\n", 0), 0u);
  EXPECT_NE(csv.find("khintchine"), std::string::npos);
  EXPECT_NE(csv.find("\"rademacher(n=3,d=2)\",khintchine,2"), std::string::npos);
  EXPECT_NE(csv.find(",diameter,inf"), std::string::npos);

  write(path("broken.jsonl"), slurp(path("pe.jsonl")) + "{truncated\n");
  EXPECT_EQ(run("report " + path("broken.jsonl"), "broken"), 1);
  EXPECT_NE(slurp(path("broken.stderr")).find("1 malformed"), std::string::npos);
}

TEST(Exe, PresetRunsAreByteIdentical) {
  ASSERT_EQ(run("preset paper-examples --seed 3 --out " + path("d1.jsonl"), "d1"), 0);
  ASSERT_EQ(run("preset paper-examples --seed 3 --out " + path("d2.jsonl"), "d2"), 0);
  EXPECT_EQ(slurp(path("d1.jsonl")), slurp(path("d2.jsonl")));
}
