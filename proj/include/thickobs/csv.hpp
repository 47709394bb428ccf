#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thickobs {

/// 17 significant digits, '.' decimal point, independent of the C locale.
std::string format_double(double v);

/// Write to a sibling temporary file and rename over the target.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Comma-separated rows; no quoting (all emitted fields are numeric or bare words).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

double parse_double(std::string_view s);

class CsvBuilder
{
 public:
  explicit CsvBuilder(std::vector<std::string> header);
  CsvBuilder& cell(std::string_view s);
  CsvBuilder& cell(double v);
  CsvBuilder& cell(long long v);
  CsvBuilder& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvBuilder& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  void end_row();
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace thickobs
