#include "toolsel/io/catalog_file.hpp"

#include <cmath>

#include "toolsel/io/errors.hpp"
#include "toolsel/io/text.hpp"
#include "toolsel/metrics/metrics.hpp"

namespace toolsel::io {

namespace {

constexpr std::size_t kColumns = 2 + kAttributeCount;

std::vector<std::string> header_columns() {
  std::vector<std::string> cols = {"tool_id", "tool_name"};
  for (const auto name : canonical_attribute_order()) cols.emplace_back(name);
  return cols;
}

// Comma-separated fields, with RFC 4180 double quotes allowed around a field.
std::vector<std::string> split_fields(const std::string& line, std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw FormatError("io", "line " + std::to_string(line_number) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string catalog_header() {
  std::string h;
  for (const auto& c : header_columns()) {
    if (!h.empty()) h.push_back(',');
    h += c;
  }
  return h;
}

LoadedCatalog parse_catalog(std::string_view content) {
  std::string text(content);
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  const auto lines = split_lines(text);
  if (lines.empty()) throw FormatError("io", "catalog file is empty");

  const auto expected = header_columns();
  const auto found = split_fields(lines.front().text, lines.front().number);
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (c >= found.size()) throw HeaderMismatch(c, expected[c], "");
    if (found[c] != expected[c]) throw HeaderMismatch(c, expected[c], found[c]);
  }
  if (found.size() > expected.size()) throw HeaderMismatch(expected.size(), "", found[expected.size()]);

  std::vector<ToolRecord> tools;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const Line& line = lines[r];
    const auto fields = split_fields(line.text, line.number);
    if (fields.size() != kColumns) {
      throw FormatError("io", "line " + std::to_string(line.number) + ": expected " +
                                  std::to_string(kColumns) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    ToolRecord tool;
    const auto id = parse_u64(fields[0]);
    if (!id) {
      throw FormatError("io", "line " + std::to_string(line.number) + ": bad tool_id '" +
                                  fields[0] + "'");
    }
    tool.tool_id = *id;
    if (!tools.empty() && tool.tool_id <= tools.back().tool_id) {
      throw FormatError("io", "line " + std::to_string(line.number) +
                                  (tool.tool_id == tools.back().tool_id ? ": duplicate tool_id "
                                                                        : ": tool_id not increasing ") +
                                  std::to_string(tool.tool_id));
    }
    tool.tool_name = fields[1];
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
      const std::string& raw = fields[2 + a];
      const auto v = parse_double(raw);
      if (!v || !std::isfinite(*v) || *v < kRatingMin || *v > kRatingMax) {
        throw ValueOutOfRange(line.number, expected[2 + a], raw);
      }
      tool.attributes[a] = *v;
    }
    tools.push_back(std::move(tool));
  }
  if (tools.empty()) throw FormatError("io", "catalog has no tools");

  LoadedCatalog loaded{ToolCatalog(std::move(tools)), {}};
  for (const ToolRecord& t : loaded.catalog.tools()) {
    loaded.rounded.emplace(t.tool_id, metrics::round_ratings(t.attributes));
  }
  return loaded;
}

LoadedCatalog load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_file(path));
}

std::string format_catalog(const ToolCatalog& catalog) {
  std::string out = catalog_header() + "\n";
  for (const ToolRecord& t : catalog.tools()) {
    out += std::to_string(t.tool_id) + "," + quote_if_needed(t.tool_name);
    for (const double v : t.attributes) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

void write_catalog(const ToolCatalog& catalog, const std::filesystem::path& path) {
  write_file(path, format_catalog(catalog));
}

}  // namespace toolsel::io
