#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace omegastar {

/// Write to `<path>.tmp` then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Minimal CSV builder: mandatory header, '\n' line endings, no trailing separator.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

/// Decimal rendering with 12 significant digits.
std::string format_sig12(double v);

}  // namespace omegastar
