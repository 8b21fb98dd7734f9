#include "dtq/report.hpp"

#include <charconv>
#include <limits>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dtq/errors.hpp"

namespace dtq {

namespace {

using ojson = nlohmann::ordered_json;

const Cell& lookup(const NamedCells& cells, std::string_view key, const char* what) {
  for (const auto& [k, v] : cells) {
    if (k == key) return v;
  }
  throw UsageError(std::string("report: no ") + what + " named '" + std::string(key) + "'");
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", std::string(line.substr(0, 40)));
  return fields;
}

// Integers first, then doubles; anything else (dyadics, tree text) stays text.
Cell infer(const std::string& field) {
  if (field.empty()) return field;
  std::int64_t i = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (auto [p, ec] = std::from_chars(first, last, i); p == last) {
    if (ec == std::errc()) return i;
    // Integer text too wide for int64 (a 64-bit seed, say) stays text.
    if (ec == std::errc::result_out_of_range) return field;
  }
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc() && p == last) return d;
  return field;
}

ojson to_json(const Cell& cell) {
  return std::visit([](const auto& v) { return ojson(v); }, cell);
}

Cell from_json(const ojson& j) {
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > std::numeric_limits<std::int64_t>::max()) {
    return std::to_string(j.get<std::uint64_t>());
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError("unsupported JSON value in report", j.dump());
}

ojson named_to_json(const NamedCells& cells) {
  ojson o = ojson::object();
  for (const auto& [k, v] : cells) o[k] = to_json(v);
  return o;
}

NamedCells named_from_json(const ojson& o) {
  NamedCells out;
  for (const auto& [k, v] : o.items()) out.emplace_back(k, from_json(v));
  return out;
}

}  // namespace

std::string render(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  return std::get<std::string>(cell);
}

double as_double(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw UsageError("report: expected a number, got '" + std::get<std::string>(cell) + "'");
}

std::int64_t as_int(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  throw UsageError("report: expected an integer, got '" + render(cell) + "'");
}

const std::string& as_string(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  throw UsageError("report: expected text, got '" + render(cell) + "'");
}

bool Report::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const Cell& Report::meta_value(std::string_view key) const { return lookup(meta, key, "meta value"); }
const Cell& Report::aggregate(std::string_view key) const { return lookup(aggregates, key, "aggregate"); }
const Cell& Report::theory_value(std::string_view key) const { return lookup(theory, key, "theory value"); }

std::size_t Report::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw UsageError("report: no column named '" + std::string(name) + "'");
}

void write_csv(std::ostream& out, const Report& report) {
  write_line(out, {"#dtq-report", std::to_string(Report::kSchemaVersion)});
  for (const auto& [k, v] : report.meta) write_line(out, {"#meta", k, render(v)});
  write_line(out, report.columns);
  for (const auto& row : report.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const auto& cell : row) fields.push_back(render(cell));
    write_line(out, fields);
  }
  for (const auto& [k, v] : report.aggregates) write_line(out, {"#aggregate", k, render(v)});
  for (const auto& [k, v] : report.theory) write_line(out, {"#theory", k, render(v)});
  for (const auto& c : report.checks) {
    write_line(out, {"#check", c.name, c.passed ? "pass" : "fail", c.detail});
  }
}

void write_json(std::ostream& out, const Report& report) {
  ojson j;
  j["schema"] = "dtq-report";
  j["version"] = Report::kSchemaVersion;
  j["meta"] = named_to_json(report.meta);
  j["columns"] = report.columns;
  ojson records = ojson::array();
  for (const auto& row : report.rows) {
    ojson rec = ojson::object();
    for (std::size_t i = 0; i < row.size(); ++i) rec[report.columns[i]] = to_json(row[i]);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  j["aggregates"] = named_to_json(report.aggregates);
  j["theory"] = named_to_json(report.theory);
  ojson checks = ojson::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  out << j.dump(2) << '\n';
}

void write_report(std::ostream& out, const Report& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    write_csv(out, report);
  } else {
    write_json(out, report);
  }
}

std::string to_text(const Report& report, ReportFormat format) {
  std::ostringstream out;
  write_report(out, report, format);
  return out.str();
}

Report read_report(std::string_view text, ReportFormat format) {
  Report r;
  if (format == ReportFormat::Json) {
    ojson j;
    try {
      j = ojson::parse(text.begin(), text.end());
    } catch (const ojson::parse_error& e) {
      throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }
    if (j.value("schema", "") != "dtq-report") throw ParseError("not a dtq report", "/schema");
    r.meta = named_from_json(j.at("meta"));
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& rec : j.at("records")) {
      std::vector<Cell> row;
      for (const auto& col : r.columns) row.push_back(from_json(rec.at(col)));
      r.rows.push_back(std::move(row));
    }
    r.aggregates = named_from_json(j.at("aggregates"));
    r.theory = named_from_json(j.at("theory"));
    for (const auto& c : j.at("checks")) {
      r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                          c.at("detail").get<std::string>()});
    }
    return r;
  }

  bool have_header = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line.front() == '#') {
      const std::string& tag = fields[0];
      if (tag == "#dtq-report") continue;
      if (tag == "#check" && fields.size() == 4) {
        r.checks.push_back({fields[1], fields[2] == "pass", fields[3]});
      } else if (fields.size() == 3 && tag == "#meta") {
        r.meta.emplace_back(fields[1], infer(fields[2]));
      } else if (fields.size() == 3 && tag == "#aggregate") {
        r.aggregates.emplace_back(fields[1], infer(fields[2]));
      } else if (fields.size() == 3 && tag == "#theory") {
        r.theory.emplace_back(fields[1], infer(fields[2]));
      } else {
        throw ParseError("unknown metadata line", "line " + std::to_string(line_no));
      }
    } else if (!have_header) {
      r.columns = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != r.columns.size()) {
        throw ParseError("record width differs from header", "line " + std::to_string(line_no));
      }
      std::vector<Cell> row;
      for (const auto& f : fields) row.push_back(infer(f));
      r.rows.push_back(std::move(row));
    }
  }
  return r;
}

}  // namespace dtq
