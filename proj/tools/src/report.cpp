#include "sunada_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sunada_cli/inputs.hpp"

namespace sunada::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::cell(double v) { return cell(format_double(v)); }
CsvTable& CsvTable::cell(std::size_t v) { return cell(std::to_string(v)); }
CsvTable& CsvTable::cell(int v) { return cell(std::to_string(v)); }
CsvTable& CsvTable::cell(bool v) { return cell(std::string(v ? "true" : "false")); }

CsvTable& CsvTable::cell(const std::string& v) {
  if (rows_.empty()) throw std::logic_error("CsvTable::cell before row()");
  if (v.find_first_of(",\"\n") == std::string::npos) {
    rows_.back().push_back(v);
    return *this;
  }
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  rows_.back().push_back(q + "\"");
  return *this;
}

std::string CsvTable::str() const {
  const auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
  };
  std::string s = line(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
    s += line(r);
  }
  return s;
}

std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write output file " + path);
  f << content;
  f.flush();
  if (!f) throw ConfigError("failed writing output file " + path);
}

}  // namespace sunada::cli
