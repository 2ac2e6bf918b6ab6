#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toolsel::io {

// Shortest decimal that parses back to the same double.
std::string format_double(double x);
// Whole-string parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Non-empty lines, with a trailing '\r' stripped; numbered from 1.
struct Line {
  std::size_t number;
  std::string text;
};
std::vector<Line> split_lines(const std::string& content);

}  // namespace toolsel::io
