#pragma once

#include <string>
#include <utility>
#include <vector>

namespace oscad {

/// Column table written as CSV: '#'-prefixed metadata lines, a header row, then rows
/// with floating values printed to 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column(const std::string& name) const;

  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);

}  // namespace oscad
