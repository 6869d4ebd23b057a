#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace qpoincare::cli {

struct ReportRow {
  std::string model;
  std::string check;
  std::string p;  // "inf", a number, or empty
  std::string q;
  std::size_t samples = 0;
  double max_ratio = 0.0;
  double min_margin = 0.0;
  std::size_t pass = 0;
};

struct Report {
  std::vector<ReportRow> rows;  // sorted by (model, check, p, q)
  std::size_t malformed = 0;
  std::vector<std::size_t> malformed_lines;  // 1-based
};

/// Groups a JSON-lines certificate stream by (model, name, p, q). Blank lines
/// are skipped; every other unparsable line is counted.
Report aggregate(std::istream& stream);

/// Header model,check,p,q,samples,max_ratio,min_margin,pass then one row per group.
void write_csv(const Report& report, std::ostream& out);

/// Aligned plain-text table.
void write_table(const Report& report, std::ostream& out);

}  // namespace qpoincare::cli
