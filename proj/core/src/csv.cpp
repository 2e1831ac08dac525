#include "rotnft/csv.hpp"

#include "rotnft/types.hpp"

#include <cstdio>
#include <fstream>

namespace rotnft {

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += header[i];
  }
  buf_ += '\n';
}

std::string CsvWriter::format(double v) {
  char tmp[40];
  std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  return tmp;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw DomainError("csv: row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += format(values[i]);
  }
  buf_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != width_) throw DomainError("csv: row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += values[i];
  }
  buf_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("csv: cannot open " + path);
  out << buf_;
}

}  // namespace rotnft
