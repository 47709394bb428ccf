#include "thickobs/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "thickobs/error.hpp"

namespace thickobs {

std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view content)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::size_t s = 0;
    while (true) {
      std::size_t c = line.find(',', s);
      row.emplace_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(std::string_view s)
{
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("not a number: '" + std::string(s) + "'");
  return v;
}

CsvBuilder::CsvBuilder(std::vector<std::string> header) : columns_(header.size())
{
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

CsvBuilder& CsvBuilder::cell(std::string_view s)
{
  if (in_row_++) out_ += ',';
  out_ += s;
  return *this;
}

CsvBuilder& CsvBuilder::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvBuilder& CsvBuilder::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

void CsvBuilder::end_row()
{
  if (in_row_ != columns_)
    throw std::logic_error("CSV row has " + std::to_string(in_row_) + " cells, header has " +
                           std::to_string(columns_));
  out_ += '\n';
  in_row_ = 0;
}

}  // namespace thickobs
