#include "oscad/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("csv row has the wrong number of values");
  rows_.push_back(values);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns_.size(); ++k)
    if (columns_[k] == name) return k;
  throw std::out_of_range("no column " + name);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) os << (k ? "," : "") << columns_[k];
  os << "\n";
  for (const auto& r : rows_) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << format_double(r[k]);
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << str();
}

}  // namespace oscad
