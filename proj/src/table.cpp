#include "lrtrunc/table.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#ifndef LRTRUNC_VERSION
#define LRTRUNC_VERSION "unknown"
#endif

namespace lrtrunc {

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += "\r\n";
}

}  // namespace

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("ResultTable needs at least one column");
}

void ResultTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(columns_.size()));
  rows_.push_back(std::move(cells));
}

void ResultTable::add_provenance(std::string key, std::string value) {
  provenance_.emplace_back(std::move(key), std::move(value));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw std::invalid_argument("no column named '" + name + "'");
}

std::string ResultTable::body_csv() const {
  std::string out;
  append_line(out, columns_);
  for (const auto& row : rows_) append_line(out, row);
  return out;
}

std::string ResultTable::csv() const {
  std::string out;
  for (const auto& [key, value] : provenance_) out += "# " + key + ": " + value + "\r\n";
  return out + body_csv();
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_number(long double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12Lg", value);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path temp =
      dir / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + temp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(temp, ec);
      throw std::runtime_error("write failed for '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw std::runtime_error("cannot rename onto '" + path + "'");
  }
}

std::string plotdata(const ResultTable& table, const std::string& x_column,
                     const std::vector<std::string>& y_columns) {
  std::vector<std::size_t> idx{table.column_index(x_column)};
  for (const auto& y : y_columns) idx.push_back(table.column_index(y));
  std::ostringstream os;
  os << '#';
  for (auto i : idx) os << ' ' << table.columns()[i];
  os << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (j) os << ' ';
      const auto& cell = row[idx[j]];
      os << (cell.empty() ? "nan" : cell);
    }
    os << '\n';
  }
  return os.str();
}

void emit_plotdata(const ResultTable& table, const std::string& x_column,
                   const std::vector<std::string>& y_columns, const std::string& path) {
  write_atomic(path, plotdata(table, x_column, y_columns));
}

std::string version_string() { return LRTRUNC_VERSION; }

}  // namespace lrtrunc
