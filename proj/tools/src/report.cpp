#include "qpoincare/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace qpoincare::cli {

namespace {

using Key = std::tuple<std::string, std::string, std::string, std::string>;

std::string number_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> as_number(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return std::nullopt;
}

std::optional<std::string> exponent_text(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::string();
  const auto v = as_number(j.at(key));
  if (!v) return std::nullopt;
  if (std::isinf(*v)) return std::string("inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", *v);
  return std::string(buf);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Report aggregate(std::istream& stream) {
  std::map<Key, ReportRow> groups;
  Report report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    bool ok = j.is_object() && j.contains("model") && j["model"].is_string() && j.contains("name") &&
              j["name"].is_string() && j.contains("pass") && j["pass"].is_boolean() && j.contains("ratio") &&
              j.contains("margin");
    std::optional<double> ratio, margin;
    std::optional<std::string> p, q;
    if (ok) {
      ratio = as_number(j["ratio"]);
      margin = as_number(j["margin"]);
      p = exponent_text(j, "p");
      q = exponent_text(j, "q");
      ok = ratio && margin && p && q;
    }
    if (!ok) {
      ++report.malformed;
      report.malformed_lines.push_back(lineno);
      continue;
    }
    const Key key{j["model"].get<std::string>(), j["name"].get<std::string>(), *p, *q};
    auto [it, fresh] = groups.try_emplace(key);
    ReportRow& row = it->second;
    if (fresh) {
      std::tie(row.model, row.check, row.p, row.q) = key;
      row.max_ratio = *ratio;
      row.min_margin = *margin;
    }
    ++row.samples;
    row.max_ratio = std::max(row.max_ratio, *ratio);
    row.min_margin = std::min(row.min_margin, *margin);
    if (j["pass"].get<bool>()) ++row.pass;
  }
  for (auto& [_, row] : groups) report.rows.push_back(std::move(row));
  return report;
}

void write_csv(const Report& report, std::ostream& out) {
  out << "model,check,p,q,samples,max_ratio,min_margin,pass\n";
  for (const ReportRow& r : report.rows)
    out << csv_field(r.model) << ',' << csv_field(r.check) << ',' << r.p << ',' << r.q << ',' << r.samples << ','
        << number_text(r.max_ratio) << ',' << number_text(r.min_margin) << ',' << r.pass << '\n';
}

void write_table(const Report& report, std::ostream& out) {
  std::vector<std::vector<std::string>> cells = {
      {"model", "check", "p", "q", "samples", "max_ratio", "min_margin", "pass"}};
  for (const ReportRow& r : report.rows) {
    char ratio[32], margin[32];
    std::snprintf(ratio, sizeof ratio, "%.6g", r.max_ratio);
    std::snprintf(margin, sizeof margin, "%.3e", r.min_margin);
    cells.push_back({r.model, r.check, r.p, r.q, std::to_string(r.samples), ratio, margin,
                     std::to_string(r.pass) + "/" + std::to_string(r.samples)});
  }
  std::vector<std::size_t> width(8, 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
}

}  // namespace qpoincare::cli
