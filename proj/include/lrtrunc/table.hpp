#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lrtrunc {

/// Rows of string cells under a fixed header, plus provenance lines.
class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  void add_provenance(std::string key, std::string value);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& provenance() const { return provenance_; }
  std::size_t column_index(const std::string& name) const;  ///< throws if missing

  /// Header row and data rows, RFC 4180 quoting.
  std::string body_csv() const;
  /// Provenance as '#' comment lines, then the body.
  std::string csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

std::string format_number(double value);
std::string format_number(long double value);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// Whitespace-separated columns under a '#' header.
std::string plotdata(const ResultTable& table, const std::string& x_column,
                     const std::vector<std::string>& y_columns);
void emit_plotdata(const ResultTable& table, const std::string& x_column,
                   const std::vector<std::string>& y_columns, const std::string& path);

/// Version string baked in at configure time.
std::string version_string();

}  // namespace lrtrunc
