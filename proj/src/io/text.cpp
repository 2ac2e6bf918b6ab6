#include "toolsel/io/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "toolsel/core/error.hpp"
#include "toolsel/io/errors.hpp"

namespace toolsel::io {

HeaderMismatch::HeaderMismatch(std::size_t column, std::string expected, std::string found)
    : FormatError("io", "header column " + std::to_string(column) + ": expected '" + expected +
                            "', found '" + found + "'"),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

ValueOutOfRange::ValueOutOfRange(std::size_t line, std::string column, std::string value)
    : FormatError("io", "line " + std::to_string(line) + ", column " + column + ": value '" +
                            value + "' is not a finite rating in [1,7]"),
      line_(line),
      column_(std::move(column)),
      value_(std::move(value)) {}

TruncatedFile::TruncatedFile(const std::string& path, std::uint64_t expected_bytes,
                             std::uint64_t actual_bytes)
    : FormatError("io", path + ": expected " + std::to_string(expected_bytes) + " bytes, found " +
                            std::to_string(actual_bytes)),
      expected_(expected_bytes),
      actual_(actual_bytes) {}

UnknownItem::UnknownItem(const std::string& context, std::uint64_t item_id)
    : FormatError("io", context + ": unknown item_id " + std::to_string(item_id)),
      item_id_(item_id) {}

ShapeError::ShapeError(std::size_t layer, const std::string& detail)
    : FormatError("io", "layer " + std::to_string(layer) + ": " + detail), layer_(layer) {}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("io", "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("io", "write failed for " + path.string());
}

std::vector<Line> split_lines(const std::string& content) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t end = content.find('\n', pos);
    std::string text = content.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (!text.empty()) lines.push_back({number, std::move(text)});
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return lines;
}

}  // namespace toolsel::io
