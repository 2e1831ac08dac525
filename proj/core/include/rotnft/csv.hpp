#pragma once

#include <string>
#include <vector>

namespace rotnft {

// Minimal deterministic CSV writer: fixed %.17g formatting, LF line ends.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);

  const std::string& str() const { return buf_; }
  void write_file(const std::string& path) const;

  static std::string format(double v);

 private:
  std::string buf_;
  size_t width_;
};

}  // namespace rotnft
