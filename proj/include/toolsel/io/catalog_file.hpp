#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "toolsel/core/records.hpp"

namespace toolsel::io {

// Catalog plus ratings rounded once at load (half-up), keyed by tool_id.
struct LoadedCatalog {
  ToolCatalog catalog;
  std::map<ToolId, RatingVector> rounded;
};

// "tool_id,tool_name,<13 attributes in registry order>"
std::string catalog_header();

LoadedCatalog parse_catalog(std::string_view content);
LoadedCatalog load_catalog(const std::filesystem::path& path);

std::string format_catalog(const ToolCatalog& catalog);
void write_catalog(const ToolCatalog& catalog, const std::filesystem::path& path);

}  // namespace toolsel::io
