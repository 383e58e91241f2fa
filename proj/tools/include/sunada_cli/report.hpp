#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace sunada::cli {

using Json = nlohmann::ordered_json;

/// 17 significant digits, "%.17g"; non-finite values print as nan / inf / -inf.
std::string format_double(double v);

/// Comma-separated table with a fixed header. Cells containing a comma,
/// quote or newline are quoted. An empty table prints its header only.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(double v);
  CsvTable& cell(std::size_t v);
  CsvTable& cell(int v);
  CsvTable& cell(bool v);
  CsvTable& cell(const std::string& v);
  CsvTable& cell(const char* v) { return cell(std::string(v)); }

  std::size_t size() const { return rows_.size(); }
  /// Throws std::logic_error when a row has the wrong number of cells.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Two-space indented JSON with a trailing newline.
std::string to_text(const Json& j);

Json complex_json(std::complex<double> z);

/// Writes content to `path`, or to `out` when path is "-". Throws ConfigError
/// when the file cannot be written.
void write_output(const std::string& path, const std::string& content, std::ostream& out);

}  // namespace sunada::cli
