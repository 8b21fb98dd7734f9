#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dtq {

/// One report value. Doubles are written with 17 significant digits.
using Cell = std::variant<std::int64_t, double, std::string>;

std::string render(const Cell& cell);
double as_double(const Cell& cell);
std::int64_t as_int(const Cell& cell);
const std::string& as_string(const Cell& cell);

using NamedCells = std::vector<std::pair<std::string, Cell>>;

struct Check {
  std::string name;  ///< e.g. "lemma4.delta_within_bound"
  bool passed = false;
  std::string detail;
};

/// Experiment output: config echo, per-sample records, aggregates that are a
/// pure function of the records, theoretical values and assertion outcomes.
struct Report {
  static constexpr int kSchemaVersion = 1;

  NamedCells meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  NamedCells aggregates;
  NamedCells theory;
  std::vector<Check> checks;

  bool all_passed() const;
  const Cell& meta_value(std::string_view key) const;
  const Cell& aggregate(std::string_view key) const;
  const Cell& theory_value(std::string_view key) const;
  std::size_t column(std::string_view name) const;
};

enum class ReportFormat { Csv, Json };

/// CSV layout: '#'-prefixed metadata lines ("#dtq-report,1", "#meta,k,v"),
/// the column header, one line per record, then "#aggregate,k,v",
/// "#theory,k,v" and "#check,name,pass|fail,detail" lines. RFC 4180 quoting.
void write_csv(std::ostream& out, const Report& report);
void write_json(std::ostream& out, const Report& report);
void write_report(std::ostream& out, const Report& report, ReportFormat format);
std::string to_text(const Report& report, ReportFormat format);

/// Inverse of the writers; numeric-looking CSV fields come back as numbers.
Report read_report(std::string_view text, ReportFormat format);

}  // namespace dtq
